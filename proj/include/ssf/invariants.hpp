#pragma once

// Universal coefficient families of the Schrodinger operator -Laplacian + v:
// Taylor operators X_n, local heat invariants g_n (closed formula and
// transport recurrence), diagonal resolvent coefficients r_n^(m), and the
// high-energy coefficients xi_n (spectral shift) and delta_n (log of the
// perturbation determinant).

#include <string>
#include <vector>

#include "ssf/jet_algebra.hpp"
#include "ssf/potential.hpp"

namespace ssf {

enum class Route { closed_formula, recurrence };

struct InvariantTable {
  int dim = 1;
  Route route = Route::closed_formula;
  int max_order = 0;
  std::vector<JetPoly> entries;  // entries[n], n = 0..max_order
};

struct CoefficientValue {
  Coefficient symbolic;
  double numeric = 0.0;
  std::string formula;
};

/// Numeric counterpart of an integrated density (e.g. xi_n for a potential).
struct NumericCoefficient {
  double value = 0.0;
  double abs_error = 0.0;
  std::string formula;
};

/// X_0 = I, X_{n+1} = X_n H_0 - H X_n.
DiffOp xn(int n, int dim);

/// Diagonal heat invariant g_n(x) from the closed (-Laplacian + v)^(k+n) |y|^(2k) formula.
JetPoly heat_invariant_closed(int n, int dim);

/// Off-diagonal g_n(x, x') from the transport recurrence; truncated at the
/// y-degree needed for the diagonal values of g_0..g_{target} (target >= n).
DisplacementPoly heat_invariant_recurrence(int n, int dim, int target = -1);

InvariantTable heat_invariant_table(int max_n, int dim, Route route);

/// c_{alpha,k} = int xi^(2 alpha) (|xi|^2 + 1)^(-k) d xi; requires k > |alpha| + d/2.
CoefficientValue c_alpha(const MultiIndex& alpha, int k, int dim);

/// r_n^(m)(x) assembled from c_{alpha,k} and the X coefficients; requires 2(m+1) > d.
JetPoly r_coeff(int n, int m, int dim);

/// (4 pi)^(-d/2) (m-1)!^(-1) Gamma(n+m+1-d/2) g_{n+1}: the heat-invariant form of r_n^(m).
JetPoly r_coeff_from_heat(int n, int m, int dim);

/// xi_n density: -(4 pi)^(-d/2) Gamma(d/2-n)^(-1) g_{n+1} (exact zero at poles).
JetPoly ssf_coeff_density(int n, int dim);

/// xi_n density through the resolvent coefficients:
/// -r_n^(m) / (m B(d/2-n, m+n+1-d/2)). Requires odd d (or n < d/2 - 1).
JetPoly ssf_coeff_density_via_resolvent(int n, int m, int dim);

/// delta_n density: -(4 pi)^(-d/2) Gamma(n+1-d/2) g_{n+1}.
JetPoly pd_coeff_density(int n, int dim);

/// Integrated heat invariant bold-g_n for a concrete potential.
NumericCoefficient heat_coefficient(const Potential& p, int n);
/// Integrated resolvent coefficient bold-r_n^(m).
NumericCoefficient resolvent_coefficient(const Potential& p, int n, int m);
/// xi_n for a concrete potential.
NumericCoefficient ssf_coefficient(const Potential& p, int n);
/// delta_n for a concrete potential (d = 1 or 3).
NumericCoefficient pd_coefficient(const Potential& p, int n);

}  // namespace ssf
