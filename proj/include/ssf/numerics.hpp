#pragma once

// Small numerical helpers shared by the scattering and trace modules.

#include <functional>
#include <vector>

namespace ssf {

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag);

/// Number of eigenvalues below `shift` of a symmetric tridiagonal matrix
/// (Sturm sequence count).
int tridiagonal_count_below(const std::vector<double>& diag, const std::vector<double>& offdiag, double shift);

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
};

/// Richardson extrapolation of f(h) -> f(0) for f(h) = f0 + c1 h + c2 h^2 + ...
/// sampled at h0, h0/2, h0/4, ... (`levels` samples).
Extrapolation richardson(const std::function<double(double)>& f, double h0, int levels);

}  // namespace ssf
