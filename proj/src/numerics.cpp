#include "ssf/numerics.hpp"

#include <lapacke.h>

#include <cmath>

#include "ssf/errors.hpp"

namespace ssf {

std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag) {
  const auto n = static_cast<lapack_int>(diag.size());
  if (n == 0) return {};
  offdiag.resize(diag.size());
  lapack_int info = LAPACKE_dsterf(n, diag.data(), offdiag.data());
  if (info != 0) fail(ErrorKind::accuracy, "tridiagonal eigenvalue iteration did not converge");
  return diag;
}

int tridiagonal_count_below(const std::vector<double>& diag, const std::vector<double>& offdiag, double shift) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double e2 = i ? offdiag[i - 1] * offdiag[i - 1] : 0.0;
    q = diag[i] - shift - (i ? e2 / q : 0.0);
    if (q == 0.0) q = 1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

Extrapolation richardson(const std::function<double(double)>& f, double h0, int levels) {
  if (levels < 1) fail(ErrorKind::domain, "richardson: need at least one level");
  std::vector<std::vector<double>> t(static_cast<std::size_t>(levels));
  double h = h0;
  for (int i = 0; i < levels; ++i, h /= 2.0) {
    auto& row = t[static_cast<std::size_t>(i)];
    row.push_back(f(h));
    double factor = 2.0;
    for (int j = 1; j <= i; ++j, factor *= 2.0) {
      const auto& prev = t[static_cast<std::size_t>(i - 1)];
      row.push_back(row[static_cast<std::size_t>(j - 1)] +
                    (row[static_cast<std::size_t>(j - 1)] - prev[static_cast<std::size_t>(j - 1)]) / (factor - 1.0));
    }
  }
  Extrapolation out;
  const auto& last = t.back();
  out.value = last.back();
  if (levels >= 2) {
    const auto& prev = t[t.size() - 2];
    out.error = std::abs(last.back() - prev.back());
  }
  return out;
}

}  // namespace ssf
