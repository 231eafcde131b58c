#include "ssf/invariants.hpp"

#include <map>
#include <mutex>

#include "ssf/errors.hpp"

namespace ssf {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) fail(ErrorKind::domain, "dimension must be 1, 2 or 3");
}

// (4 pi)^(-d/2) = 2^(-d) pi^(-d/2).
Coefficient four_pi_power(int dim) {
  return Coefficient(mpq_class(1, mpz_class(1) << dim), -dim);
}

template <class Key, class Value, class Make>
Value cached(std::map<Key, Value>& cache, std::mutex& mutex, const Key& key, Make&& make) {
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Value v = make();
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(v)).first->second;
}

}  // namespace

DiffOp xn(int n, int dim) {
  check_dim(dim);
  if (n < 0) fail(ErrorKind::domain, "xn: n must be non-negative");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, DiffOp> cache;
  return cached(cache, mutex, std::make_pair(n, dim), [&] {
    if (n == 0) return DiffOp::identity(dim);
    DiffOp prev = xn(n - 1, dim);
    return compose(prev, DiffOp::free_hamiltonian(dim)) - compose(DiffOp::schrodinger(dim), prev);
  });
}

JetPoly heat_invariant_closed(int n, int dim) {
  check_dim(dim);
  if (n < 0) fail(ErrorKind::domain, "heat invariant order must be non-negative");
  if (n == 0) return JetPoly(dim, Coefficient(1));
  static std::mutex mutex;
  static std::map<std::pair<int, int>, JetPoly> cache;
  return cached(cache, mutex, std::make_pair(n, dim), [&] {
    JetPoly g(dim);
    const Coefficient prefactor =
        Coefficient(n % 2 ? -1 : 1) * *gamma_half(2L * n + dim);
    for (int k = 0; k <= n - 1; ++k) {
      const int steps = k + n;
      DisplacementPoly f = DisplacementPoly::radius_power(dim, k);
      for (int j = 1; j <= steps; ++j) {
        // Only monomials that the remaining Laplacians can still bring down
        // to y^0 contribute to the diagonal.
        const int remaining = steps - j;
        f = schrodinger_apply(f, 2 * remaining);
      }
      mpz_class four_k = mpz_class(1) << (2 * k);
      Coefficient denom = Coefficient(mpq_class(four_k * factorial(k) * factorial(k + n) * factorial(n - 1 - k))) *
                          *gamma_half(2L * k + dim + 2);
      g += f.diagonal() * (prefactor / denom);
    }
    return g;
  });
}

DisplacementPoly heat_invariant_recurrence(int n, int dim, int target) {
  check_dim(dim);
  if (n < 0) fail(ErrorKind::domain, "heat invariant order must be non-negative");
  if (target < n) target = n;
  // g_j is needed up to y-degree 2 (target - j) to feed the Laplacians that
  // produce the diagonal of g_target.
  DisplacementPoly g = DisplacementPoly::monomial(dim, MultiIndex{}, Coefficient(1));
  for (int j = 0; j < n; ++j) {
    const int keep = 2 * (target - j - 1);
    DisplacementPoly taylor = DisplacementPoly::potential_taylor(dim, keep);
    DisplacementPoly source = g.laplacian_y() - g.multiply(taylor, keep);
    g = sigma_integrate(source.truncated(keep), j);
  }
  return g;
}

InvariantTable heat_invariant_table(int max_n, int dim, Route route) {
  InvariantTable t;
  t.dim = dim;
  t.route = route;
  t.max_order = max_n;
  for (int n = 0; n <= max_n; ++n) {
    if (route == Route::closed_formula) t.entries.push_back(heat_invariant_closed(n, dim));
    else t.entries.push_back(heat_invariant_recurrence(n, dim).diagonal());
  }
  return t;
}

CoefficientValue c_alpha(const MultiIndex& alpha, int k, int dim) {
  check_dim(dim);
  for (int i = dim; i < kMaxDim; ++i)
    if (alpha[i] != 0) fail(ErrorKind::domain, "c_alpha: multi-index has components beyond the dimension");
  // Convergence: 2k > 2|alpha| + d.
  if (2L * k <= 2L * alpha.order() + dim)
    fail(ErrorKind::domain, "c_alpha: integral diverges (need k > |alpha| + d/2)");
  Coefficient c(1);
  for (int i = 0; i < dim; ++i) c = c * *gamma_half(2L * alpha[i] + 1);
  c = c * *gamma_half(2L * (k - alpha.order()) - dim);
  c = c / *gamma_half(2L * k);
  return {c, c.to_double(), "prod Gamma(alpha_i + 1/2) Gamma(k - |alpha| - d/2) / Gamma(k)"};
}

JetPoly r_coeff(int n, int m, int dim) {
  check_dim(dim);
  if (n < 0 || m < 1) fail(ErrorKind::domain, "r_coeff: need n >= 0 and m >= 1");
  if (2 * (m + 1) <= dim) fail(ErrorKind::domain, "r_coeff: need 2(m+1) > d");
  // (2 pi)^(-d)
  const Coefficient two_pi(mpq_class(1, mpz_class(1) << dim), -2 * dim);
  JetPoly r(dim);
  for (const auto& alpha : multi_indices(dim, n)) {
    const int a = alpha.order();
    const int N = n + a + 1;
    JetPoly p = xn(N, dim).coefficient(alpha + alpha);
    if (p.is_zero()) continue;
    Coefficient c = c_alpha(alpha, a + n + m + 1, dim).symbolic;
    Coefficient w = Coefficient(mpq_class(binomial(a + n + m, m - 1))) * c;
    if (a % 2) w = -w;
    r += p * w;
  }
  return r * two_pi;
}

JetPoly r_coeff_from_heat(int n, int m, int dim) {
  check_dim(dim);
  if (n < 0 || m < 1) fail(ErrorKind::domain, "r_coeff: need n >= 0 and m >= 1");
  if (2 * (m + 1) <= dim) fail(ErrorKind::domain, "r_coeff: need 2(m+1) > d");
  auto gamma = gamma_half(2L * (n + m + 1) - dim);
  if (!gamma) return JetPoly(dim);
  Coefficient c = four_pi_power(dim) * Coefficient(mpq_class(1, factorial(m - 1))) * *gamma;
  return heat_invariant_closed(n + 1, dim) * c;
}

JetPoly ssf_coeff_density(int n, int dim) {
  check_dim(dim);
  if (n < 0) fail(ErrorKind::domain, "ssf_coeff: n must be non-negative");
  Coefficient c = -(four_pi_power(dim) * reciprocal_gamma_half(static_cast<long>(dim) - 2L * n));
  if (c.is_zero()) return JetPoly(dim);
  return heat_invariant_closed(n + 1, dim) * c;
}

JetPoly ssf_coeff_density_via_resolvent(int n, int m, int dim) {
  check_dim(dim);
  // B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q), p = d/2 - n, q = m + n + 1 - d/2.
  auto gp = gamma_half(static_cast<long>(dim) - 2L * n);
  auto gq = gamma_half(2L * (m + n + 1) - dim);
  auto gpq = gamma_half(2L * (m + 1));
  if (!gp || !gq || !gpq) fail(ErrorKind::domain, "beta function has a pole for these parameters");
  Coefficient beta = (*gp * *gq) / *gpq;
  Coefficient c = -(Coefficient(1) / (Coefficient(m) * beta));
  return r_coeff(n, m, dim) * c;
}

JetPoly pd_coeff_density(int n, int dim) {
  check_dim(dim);
  if (n < 0) fail(ErrorKind::domain, "pd_coeff: n must be non-negative");
  auto gamma = gamma_half(2L * (n + 1) - dim);
  if (!gamma) fail(ErrorKind::domain, "pd_coeff: Gamma(n+1-d/2) has a pole");
  Coefficient c = -(four_pi_power(dim) * *gamma);
  return heat_invariant_closed(n + 1, dim) * c;
}

namespace {

NumericCoefficient integrate(const Potential& p, const JetPoly& density, std::string formula) {
  DensityIntegral di = integrate_density(p, density);
  return {di.value, di.abs_error_estimate, std::move(formula)};
}

}  // namespace

NumericCoefficient heat_coefficient(const Potential& p, int n) {
  return integrate(p, heat_invariant_closed(n, p.dim()), "int g_n dx");
}

NumericCoefficient resolvent_coefficient(const Potential& p, int n, int m) {
  return integrate(p, r_coeff(n, m, p.dim()), "int r_n^(m) dx");
}

NumericCoefficient ssf_coefficient(const Potential& p, int n) {
  return integrate(p, ssf_coeff_density(n, p.dim()), "-(4 pi)^(-d/2) g_{n+1} / Gamma(d/2 - n)");
}

NumericCoefficient pd_coefficient(const Potential& p, int n) {
  if (p.dim() == 2) fail(ErrorKind::unsupported, "pd_coeff: no d = 2 numerics");
  return integrate(p, pd_coeff_density(n, p.dim()), "-(4 pi)^(-d/2) Gamma(n + 1 - d/2) g_{n+1}");
}

}  // namespace ssf
