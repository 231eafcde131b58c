#include "ssf/trace_lab.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/numerics.hpp"
#include "ssf/scattering_radial3d.hpp"

namespace ssf {

namespace {

constexpr double kPi = std::numbers::pi;
using Cplx = std::complex<double>;

void require_supported_dim(int d) {
  if (d != 1 && d != 3) fail(ErrorKind::unsupported, "trace evaluations are implemented for d = 1 and d = 3");
}

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

// Bisection on a single Gauss-Kronrod panel until the panel error is below
// its share of the absolute tolerance.
template <class F>
Quadrature integrate_panel(F& f, double a, double b, double tol_per_length, int depth) {
  double err = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol_per_length * (b - a) || depth == 0) return {value, err};
  const double mid = 0.5 * (a + b);
  Quadrature l = integrate_panel(f, a, mid, tol_per_length, depth - 1);
  Quadrature r = integrate_panel(f, mid, b, tol_per_length, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

// Adaptive quadrature over consecutive breakpoints to an absolute tolerance.
template <class F>
Quadrature integrate(F f, const std::vector<double>& points, double abs_tol) {
  Quadrature q;
  const double length = points.back() - points.front();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    Quadrature part = integrate_panel(f, points[i], points[i + 1], abs_tol / length, 8);
    q.value += part.value;
    q.error += part.error;
  }
  return q;
}

std::vector<double> momentum_breaks(double k_max) {
  std::vector<double> pts{0.0};
  for (double b : {0.5, 1.5, 3.0, 6.0, 12.0, 24.0, 48.0})
    if (b < k_max) pts.push_back(b);
  pts.push_back(k_max);
  return pts;
}

double max_abs_potential(const Potential& p) {
  double R = std::max(2.0 * p.support_radius(), 4.0);
  double m = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double x = (p.dim() == 1 ? -R : 0.0) + (p.dim() == 1 ? 2.0 * R : R) * i / 400.0;
    m = std::max(m, std::abs(p(x)));
  }
  return m;
}

double default_half_width(const Potential& p) {
  if (p.dim() == 1) return std::max(25.0, truncation_radius(p) + 5.0);
  return std::max(25.0, radial_truncation_radius(p) + 15.0);
}

GridOracle oracle_for(const Potential& p, const OracleOptions& o, double mesh_factor) {
  double L = o.half_width > 0.0 ? o.half_width : default_half_width(p);
  double span = p.dim() == 1 ? 2.0 * L : L;
  // Radial grids are built once per channel, so they use half the cap.
  const int points = p.dim() == 1 ? kGridDimensionCap : kGridDimensionCap / 2;
  double h = o.mesh > 0.0 ? o.mesh : span / (points + 1);
  return build_grid_oracle(p, L, h * mesh_factor, o.l_max > 0 ? o.l_max : 12);
}

// Angular momenta that feel the potential at momenta up to k_max.
int channel_cutoff(const Potential& p, double k_max) {
  if (p.dim() == 1) return 0;
  const double vmax = max_abs_potential(p);
  double r = 0.5;
  for (double x = 0.05; x < 4.0 * p.support_radius(); x += 0.05)
    if (std::abs(p(x)) > 1e-6 * vmax) r = x;
  return static_cast<int>(std::ceil(r * k_max)) + 5;
}

// Mesh h and 2h with h^2 extrapolation.
template <class F>
auto richardson_mesh(const Potential& p, const OracleOptions& o, F f) {
  auto fine = f(oracle_for(p, o, 1.0));
  auto coarse = f(oracle_for(p, o, 2.0));
  auto value = fine + (fine - coarse) / 3.0;
  return std::make_pair(value, std::abs(fine - coarse) / 3.0);
}

// Absolute quadrature tolerance for SSF integrals: the radial xi carries a
// partial-wave truncation error well above the 1D solver noise.
double ssf_quadrature_tolerance(int d, double requested) { return d == 1 ? requested : std::max(requested, 1e-8); }

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

// ---------------------------------------------------------------- grid oracle

GridOracle build_grid_oracle(const Potential& p, double half_width, double mesh, int l_max) {
  require_supported_dim(p.dim());
  if (!(half_width > 0.0) || !(mesh > 0.0)) fail(ErrorKind::domain, "grid oracle needs L > 0 and h > 0");
  GridOracle g;
  g.dim = p.dim();
  g.half_width = half_width;
  g.mesh = mesh;
  const double span = p.dim() == 1 ? 2.0 * half_width : half_width;
  const long n = std::lround(span / mesh) - 1;
  if (n > kGridDimensionCap) fail(ErrorKind::capability, "grid oracle dimension exceeds the cap of 4000");
  if (n < 2) fail(ErrorKind::domain, "grid oracle mesh is too coarse for the box");
  const double h = span / static_cast<double>(n + 1);
  g.mesh = h;
  const double inv_h2 = 1.0 / (h * h);
  const int channels = p.dim() == 1 ? 1 : l_max + 1;
  for (int ell = 0; ell < channels; ++ell) {
    GridOracle::Channel c;
    c.ell = ell;
    c.weight = p.dim() == 1 ? 1 : 2 * ell + 1;
    c.off = -inv_h2;
    c.diag.resize(static_cast<std::size_t>(n));
    c.free_diag.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      double x = (p.dim() == 1 ? -half_width : 0.0) + h * static_cast<double>(i + 1);
      double centrifugal = p.dim() == 1 ? 0.0 : ell * (ell + 1.0) / (x * x);
      c.free_diag[static_cast<std::size_t>(i)] = 2.0 * inv_h2 + centrifugal;
      c.diag[static_cast<std::size_t>(i)] = 2.0 * inv_h2 + centrifugal + p(x);
    }
    std::vector<double> off(static_cast<std::size_t>(n - 1), c.off);
    c.eigenvalues = tridiagonal_eigenvalues(c.diag, off);
    c.free_eigenvalues = tridiagonal_eigenvalues(c.free_diag, off);
    g.channels.push_back(std::move(c));
  }
  return g;
}

std::complex<double> determinant_oracle(const GridOracle& oracle, std::complex<double> z) {
  if (oracle.dim != 1) fail(ErrorKind::unsupported, "determinant oracle is implemented for d = 1");
  const auto& c = oracle.channels.front();
  Cplx log_ratio{};
  for (std::size_t i = 0; i < c.eigenvalues.size(); ++i) {
    Cplx num = c.eigenvalues[i] - z, den = c.free_eigenvalues[i] - z;
    if (std::abs(num) < 1e-12 || std::abs(den) < 1e-12)
      fail(ErrorKind::domain, "determinant oracle: z sits on the grid spectrum");
    log_ratio += std::log(num / den);
  }
  return std::exp(log_ratio);
}

LogDerivativeCheck log_derivative_check(const Potential& p, const GridOracle& oracle, std::complex<double> z) {
  if (p.dim() != 1 || oracle.dim != 1) fail(ErrorKind::unsupported, "log-derivative check is implemented for d = 1");
  if (std::abs(z.imag()) < 1e-6 && z.real() > -1e-6) fail(ErrorKind::domain, "z must be off [0, inf)");
  LogDerivativeCheck out;
  out.z = z;
  const double step = 1e-4 * std::max(1.0, std::abs(z));
  Cplx up = perturbation_determinant_1d(p, z + step), down = perturbation_determinant_1d(p, z - step);
  out.log_derivative = std::log(up / down) / (2.0 * step);
  out.grid_trace = oracle.trace_difference([&](double e) { return -1.0 / Cplx(e - z); });
  out.relative_error = std::abs(out.log_derivative - out.grid_trace) / std::max(std::abs(out.grid_trace), 1e-300);
  return out;
}

// ---------------------------------------------------------------- SSF model

SsfModel::SsfModel(const Potential& p, int coefficient_count) : potential_(p) {
  require_supported_dim(p.dim());
  if (p.dim() == 1) {
    ssf1d_.emplace(p);
    eigenvalues_ = ssf1d_->eigenvalues();
  } else {
    eigenvalues_ = eigenvalues_3d(p);
  }
  const int count = p.smooth() ? coefficient_count : 1;
  for (int n = 0; n < count; ++n) coefficients_.push_back(p.is_zero() ? 0.0 : ssf_coefficient(p, n).value);
  asymptotic_k_ = std::max(6.0, 3.0 * std::sqrt(max_abs_potential(p)));
}

double SsfModel::xi_k(double k) const {
  {
    std::lock_guard lock(mutex_);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
  }
  double value = potential_.is_zero() ? 0.0 : (ssf1d_ ? ssf1d_->xi_k(k) : ssf_3d_value(potential_, k * k));
  std::lock_guard lock(mutex_);
  memo_.emplace(k, value);
  return value;
}

double SsfModel::series_term(int j, double k) const {
  return coefficients_.at(static_cast<std::size_t>(j)) * std::pow(k, dim() - 2 - 2 * j);
}

// ---------------------------------------------------------------- gamma

double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0)) fail(ErrorKind::domain, "upper incomplete gamma needs x > 0");
  if (a > 0.0) return boost::math::tgamma(a, x);
  // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a, stepping down from a + m > 0.
  int m = static_cast<int>(std::floor(-a)) + 1;
  double value = boost::math::tgamma(a + m, x);
  for (int i = m - 1; i >= 0; --i) {
    double s = a + i;
    if (s == 0.0) fail(ErrorKind::domain, "upper incomplete gamma at a non-positive integer");
    value = (value - std::pow(x, s) * std::exp(-x)) / s;
  }
  return value;
}

// ---------------------------------------------------------------- heat trace

HeatTrace heat_trace_diff(const SsfModel& model, double t, const OracleOptions& oracle) {
  if (!(t > 0.0)) fail(ErrorKind::domain, "heat trace needs t > 0");
  HeatTrace out;
  out.t = t;
  const Potential& p = model.potential();
  if (p.is_zero()) return out;
  const int d = model.dim();
  const auto& xi = model.coefficients();

  // SSF route: eigenvalue steps plus -t int_0^inf 2k xi e^{-t k^2} dk.
  double neg = 0.0;
  for (double e : model.eigenvalues()) neg += std::expm1(-t * e);
  const double K = std::min(std::sqrt(50.0 / t), model.asymptotic_k());
  auto body = integrate([&](double k) { return 2.0 * k * model.xi_k(k) * std::exp(-t * k * k); }, momentum_breaks(K),
                        ssf_quadrature_tolerance(d, 1e-11));
  double tail = 0.0, remainder = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    double term = xi[j] * std::pow(t, static_cast<double>(j) - 0.5 * d) *
                  upper_incomplete_gamma(0.5 * d - static_cast<double>(j), t * K * K);
    tail += term;
    if (j + 1 == xi.size()) remainder = std::abs(term);
  }
  if (xi.size() < 2) remainder = std::abs(tail) + std::exp(-t * K * K);
  out.via_ssf.value = neg - t * (body.value + tail);
  out.via_ssf.error = t * (body.error + remainder) + 1e-10 * std::abs(out.via_ssf.value);

  // Grid oracle, extrapolated in the mesh.
  OracleOptions grid_opts = oracle;
  if (grid_opts.l_max <= 0) grid_opts.l_max = channel_cutoff(p, std::sqrt(25.0 / t));
  auto [grid, grid_err] = richardson_mesh(p, grid_opts, [&](const GridOracle& g) {
    return g.trace_difference([&](double e) { return std::exp(-t * e); });
  });
  out.via_oracle = {grid, grid_err};

  // (4 pi t)^{-d/2} sum_{n=1}^{5} g_n t^n.
  double series = 0.0, last = 0.0;
  for (int n = 1; n <= 5; ++n) {
    last = heat_coefficient(p, n).value * std::pow(t, n);
    series += last;
  }
  const double pref = std::pow(4.0 * kPi * t, -0.5 * d);
  out.via_series = {pref * series, pref * std::abs(last)};
  return out;
}

// ---------------------------------------------------------------- resolvent trace

ResolventTrace resolvent_trace_diff(const SsfModel& model, std::complex<double> z, int m, int series_terms,
                                    const OracleOptions& oracle) {
  const int d = model.dim();
  if (m < 1 || 2 * (m + 1) <= d) fail(ErrorKind::domain, "resolvent trace needs m >= 1 and 2(m+1) > d");
  if (std::abs(z.imag()) < 1e-6 && z.real() > -1e-6) fail(ErrorKind::domain, "z is within 1e-6 of [0, inf)");
  for (double e : model.eigenvalues())
    if (std::abs(Cplx(e) - z) < 1e-6) fail(ErrorKind::domain, "z is within 1e-6 of an eigenvalue");
  ResolventTrace out;
  out.z = z;
  out.m = m;
  out.series_terms = series_terms;
  const Potential& p = model.potential();
  if (p.is_zero()) return out;
  const auto& xi = model.coefficients();

  // SSF route.
  Cplx neg{};
  for (double e : model.eigenvalues()) neg += std::pow(Cplx(e) - z, -m) - std::pow(-z, -m);
  const double K = std::max(model.asymptotic_k(), 2.0 * std::sqrt(std::abs(z)));
  auto kernel = [&](double k) { return 2.0 * k * model.xi_k(k) * std::pow(Cplx(k * k) - z, -m - 1); };
  std::vector<double> pts = momentum_breaks(K);
  if (z.real() > 0.0) {
    pts.push_back(std::sqrt(z.real()));
    std::sort(pts.begin(), pts.end());
  }
  const double qtol = ssf_quadrature_tolerance(d, 1e-12);
  auto re = integrate([&](double k) { return kernel(k).real(); }, pts, qtol);
  auto im = integrate([&](double k) { return kernel(k).imag(); }, pts, qtol);
  // Tail: (k^2 - z)^{-m-1} = sum_i C(m+i, i) z^i k^{-2m-2-2i} for k > K.
  Cplx tail{};
  double remainder = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    Cplx term_j{};
    Cplx zi(1.0);
    double binom = 1.0;
    for (int i = 0; i < 200; ++i) {
      double e = d - 3.0 - 2.0 * j - 2.0 * m - 2.0 * i;
      Cplx term = binom * zi * 2.0 * std::pow(K, e + 1.0) / (-(e + 1.0));
      term_j += term;
      if (std::abs(term) < 1e-18 * std::abs(term_j)) break;
      zi *= z;
      binom *= static_cast<double>(m + i + 1) / (i + 1.0);
    }
    tail += xi[j] * term_j;
    if (j + 1 == xi.size()) remainder = std::abs(xi[j] * term_j);
  }
  out.via_ssf.value = neg - static_cast<double>(m) * (Cplx(re.value, im.value) + tail);
  out.via_ssf.error = m * (re.error + im.error + remainder) + 1e-10 * std::abs(out.via_ssf.value);

  OracleOptions grid_opts = oracle;
  if (grid_opts.l_max <= 0) grid_opts.l_max = channel_cutoff(p, std::sqrt(std::abs(z)) + 5.0);
  auto resolvent_sum = [&](const GridOracle& g) {
    return g.trace_difference([&](double e) { return std::pow(Cplx(e) - z, -m); });
  };
  auto [grid, grid_err] = richardson_mesh(p, grid_opts, resolvent_sum);
  // Near the cut the free resolvent decays slowly, so the box size matters:
  // compare against a box shrunk by 20% at the same mesh.
  const GridOracle full = oracle_for(p, grid_opts, 1.0);
  OracleOptions shrunk = grid_opts;
  shrunk.half_width = 0.8 * full.half_width;
  shrunk.mesh = full.mesh;
  const double box_err = std::abs(resolvent_sum(full) - resolvent_sum(oracle_for(p, shrunk, 1.0)));
  out.via_oracle = {grid, grid_err + box_err};

  // sum_n r_n^(m) (-z)^{d/2 - m - n - 1}.
  Cplx series{};
  for (int n = 0; n < series_terms; ++n)
    series += resolvent_coefficient(p, n, m).value * std::pow(-z, 0.5 * d - m - n - 1.0);
  double next = std::abs(resolvent_coefficient(p, series_terms, m).value *
                         std::pow(-z, 0.5 * d - m - series_terms - 1.0));
  out.via_series = {series, next};
  return out;
}

// ---------------------------------------------------------------- reports

double IdentityReport::lhs_total() const {
  double s = 0.0;
  for (const auto& piece : lhs) s += piece.value;
  return s;
}

void IdentityReport::finish() {
  residual = lhs_total() - rhs;
  bool finite = std::isfinite(residual) && std::isfinite(error_budget);
  for (const auto& piece : lhs) finite = finite && std::isfinite(piece.value);
  pass = finite && std::abs(residual) <= tolerance && error_budget <= tolerance;
}

IdentityReport trace_identity_integer(const SsfModel& model, int n, const IdentityOptions& opts) {
  const int d = model.dim();
  if (n < 1) fail(ErrorKind::domain, "integer identity needs n >= 1");
  IdentityReport r;
  r.tag = "integer_order";
  r.dim = d;
  r.order = n;
  r.potential = model.potential().describe();
  r.tolerance = opts.tolerance;
  const auto& xi = model.coefficients();
  const int J = (d - 3) / 2 + n;  // highest subtracted index
  double eig_sum = 0.0;
  for (double e : model.eigenvalues()) eig_sum += std::pow(e, n);
  eig_sum /= n;

  if (model.potential().is_zero()) {
    r.lhs = {{"integral_below_split", 0.0}, {"series_tail", 0.0}, {"eigenvalue_sum", 0.0}};
    r.finish();
    return r;
  }
  if (static_cast<int>(xi.size()) < J + 2)
    fail(ErrorKind::refinement, "integer identity: not enough high-energy coefficients for the tail");

  // Kept tail terms j = J+1 .. C-2; j = C-1 is the remainder bound.
  const int C = static_cast<int>(xi.size());
  auto tail_term = [&](int j, double K) {
    double pw = 2.0 * n + d - 2.0 - 2.0 * j;  // exponent after integrating 2 k^{2n-1} k^{d-2-2j}
    return 2.0 * xi[static_cast<std::size_t>(j)] * std::pow(K, pw) / (-pw);
  };
  double K = 0.0, remainder = 0.0;
  for (double f : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0}) {
    K = model.asymptotic_k() * f;
    remainder = std::abs(tail_term(C - 1, K));
    if (remainder < 0.1 * opts.tolerance) break;
  }
  if (remainder >= 0.1 * opts.tolerance)
    fail(ErrorKind::refinement, "integer identity: series tail remainder exceeds the budget");
  double tail = 0.0;
  for (int j = J + 1; j <= C - 2; ++j) tail += tail_term(j, K);

  auto integrand = [&](double k) {
    double s = 2.0 * std::pow(k, 2 * n - 1) * model.xi_k(k);
    for (int j = 0; j <= J; ++j) s -= 2.0 * xi[static_cast<std::size_t>(j)] * std::pow(k, 2 * n + d - 3 - 2 * j);
    return s;
  };
  auto body = integrate(integrand, momentum_breaks(K), ssf_quadrature_tolerance(d, 1e-3 * opts.tolerance));
  const double solver = 1e-10 * std::pow(K, 2 * n) / n;

  r.lhs = {{"integral_below_split", body.value}, {"series_tail", tail}, {"eigenvalue_sum", eig_sum}};
  r.rhs = 0.0;
  r.error_budget = body.error + remainder + solver;
  r.extra = {{"split_momentum", K},
             {"tail_remainder_bound", remainder},
             {"c_n", r.lhs_total() / factorial(n - 1)}};
  r.finish();
  return r;
}

IdentityReport trace_identity_half(const SsfModel& model, int n, const IdentityOptions& opts) {
  if (model.dim() != 1) fail(ErrorKind::unsupported, "half-integer identities are implemented for d = 1 only");
  if (n < 0) fail(ErrorKind::domain, "half-integer identity needs n >= 0");
  IdentityReport r;
  r.tag = "half_integer";
  r.dim = 1;
  r.order = n;
  r.potential = model.potential().describe();
  r.tolerance = opts.tolerance;
  const Potential& p = model.potential();
  double eig_sum = 0.0;
  for (double e : model.eigenvalues()) eig_sum += std::pow(std::abs(e), n + 0.5);
  eig_sum /= -(n + 0.5);

  double integral = 0.0, budget = 0.0, small_part = 0.0;
  if (!p.is_zero()) {
    const Ssf1d& s = *model.one_dimensional();
    const int q = 2 * n + 1;
    // Near k = 0: |a| ~ A / k (generic) or A (zero-energy resonance).
    const double k1 = 1e-3;
    const bool resonant = s.zero_energy().resonant;
    const double ln_a1 = s.ln_abs_a(k1);
    const double ln_A = resonant ? ln_a1 : ln_a1 + std::log(k1);
    const double kq = std::pow(k1, q);
    small_part = 2.0 * ln_A * kq / q;
    if (!resonant) small_part -= 2.0 * (kq * std::log(k1) / q - kq / (q * static_cast<double>(q)));
    budget += std::abs(small_part) * k1 * 10.0;

    // Upper cut where k^{2n+1} ln|a| is negligible.
    double K = 4.0;
    auto weight = [&](double k) { return std::abs(2.0 * std::pow(k, q) * s.ln_abs_a(k)); };
    while (weight(K) + weight(1.5 * K) > 1e-3 * opts.tolerance) {
      K *= 1.5;
      if (K > 4.0 * s.top_k()) fail(ErrorKind::refinement, "half-integer identity: ln|a| tail decays too slowly");
    }
    std::vector<double> pts{k1};
    for (double b : momentum_breaks(K))
      if (b > k1) pts.push_back(b);
    auto body = integrate([&](double k) { return 2.0 * std::pow(k, 2 * n) * s.ln_abs_a(k); }, pts, 1e-10);
    integral = body.value + small_part;
    budget += body.error + 1e-3 * opts.tolerance + 1e-10 * std::pow(K, q);
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  r.lhs = {{"log_modulus_integral", sign / kPi * integral}, {"eigenvalue_sum", eig_sum}};
  r.rhs = p.is_zero() ? 0.0 : pd_coefficient(p, n).value;
  r.error_budget = budget / kPi;
  const double shifted = p.is_zero() ? 0.0 : pd_coefficient(p, n + 1).value;
  r.extra = {{"delta_n_plus_1", shifted}, {"residual_against_delta_n_plus_1", r.lhs_total() - shifted}};
  r.finish();
  return r;
}

IdentityReport birman_krein_check(const SsfModel& model, const std::vector<double>& lambda_grid, double tolerance) {
  IdentityReport r;
  r.tag = "birman_krein";
  r.dim = model.dim();
  r.potential = model.potential().describe();
  r.tolerance = tolerance;
  double worst = 0.0, at = 0.0;
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0)) fail(ErrorKind::domain, "Birman-Krein grid must be positive");
    const double k = std::sqrt(lambda);
    Cplx det = model.dim() == 1 ? smatrix_1d(model.potential(), k).det : smatrix_det_3d(model.potential(), k);
    Cplx target = std::exp(Cplx(0.0, -2.0 * kPi * model.xi_k(k)));
    double defect = std::abs(det - target);
    if (defect > worst) {
      worst = defect;
      at = lambda;
    }
  }
  r.lhs = {{"max_defect", worst}};
  r.rhs = 0.0;
  r.error_budget = model.dim() == 1 ? 1e-9 : 1e-6;
  r.extra = {{"worst_lambda", at}, {"grid_points", static_cast<double>(lambda_grid.size())}};
  r.finish();
  return r;
}

IdentityReport levinson_check(const SsfModel& model, double tolerance) {
  IdentityReport r;
  r.tag = "levinson";
  r.dim = model.dim();
  r.potential = model.potential().describe();
  r.tolerance = tolerance;
  const double N = static_cast<double>(model.eigenvalues().size());
  if (model.dim() == 1) {
    ZeroEnergy1d z = model.one_dimensional()->zero_energy();
    r.lhs = {{"xi_at_zero", z.xi_at_zero}};
    // Generic wells: xi(0+) = -N + 1/2; zero-energy resonance: -N.
    r.rhs = z.resonant ? -N : -N + 0.5;
    r.error_budget = z.extrapolation_error;
    r.extra = {{"bound_states", N}, {"resonant", z.resonant ? 1.0 : 0.0}, {"amplitude_ratio", z.amplitude_ratio}};
  } else {
    LevinsonReport z = levinson_check_3d(model.potential());
    r.lhs = {{"xi_at_zero", z.xi_at_zero}};
    r.rhs = z.resonant ? -N - 0.5 : -N;
    r.error_budget = z.extrapolation_error;
    r.extra = {{"bound_states", N}, {"resonant", z.resonant ? 1.0 : 0.0}, {"scattering_length", z.scattering_length}};
  }
  r.finish();
  return r;
}

// ---------------------------------------------------------------- constants

AsymptoticConstants asymptotic_constants(const SsfModel& model, int max_n, const IdentityOptions& opts) {
  AsymptoticConstants out;
  const auto& xi = model.coefficients();
  if (!model.potential().is_zero()) {
    const double K = 2.0 * model.asymptotic_k();
    double series = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) series += model.series_term(static_cast<int>(j), K);
    out.gamma = model.xi_k(K) - series;
    out.gamma_error = std::abs(model.series_term(static_cast<int>(xi.size()) - 1, K)) + 1e-10;
  }
  for (int n = 1; n <= max_n; ++n) {
    IdentityReport r = trace_identity_integer(model, n, opts);
    out.c.push_back(r.lhs_total() / factorial(n - 1));
    out.c_error.push_back(r.error_budget / factorial(n - 1));
  }
  return out;
}

PurityFit odd_dimension_purity(const SsfModel& model, const std::vector<double>& times) {
  if (times.size() < 3) fail(ErrorKind::domain, "purity fit needs at least three times");
  const int d = model.dim();
  const auto& xi = model.coefficients();
  std::vector<double> rem;
  double route_error = 0.0;
  for (double t : times) {
    HeatTrace h = heat_trace_diff(model, t, OracleOptions{});
    double singular = 0.0;
    for (std::size_t n = 0; n < xi.size(); ++n)
      singular -= std::tgamma(0.5 * d - n) * xi[n] * std::pow(t, n + 1.0 - 0.5 * d);
    rem.push_back(h.via_ssf.value - singular);
    route_error = std::max(route_error, h.via_ssf.error);
  }
  // Least squares rem ~ A + B t.
  const double n = static_cast<double>(times.size());
  const double st = std::accumulate(times.begin(), times.end(), 0.0);
  const double sr = std::accumulate(rem.begin(), rem.end(), 0.0);
  double stt = 0.0, str = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    stt += times[i] * times[i];
    str += times[i] * rem[i];
  }
  const double det = n * stt - st * st;
  PurityFit f;
  f.linear = (n * str - st * sr) / det;
  f.constant = (sr - f.linear * st) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double e = rem[i] - f.constant - f.linear * times[i];
    rss += e * e;
  }
  f.fit_error = std::sqrt(rss / n) + route_error;
  return f;
}

}  // namespace ssf
