#include "ssf/scattering_1d.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/numerics.hpp"

namespace ssf {

namespace {

using State = std::array<Complex, 2>;
constexpr double kPi = std::numbers::pi;

void require_1d(const Potential& p) {
  if (p.dim() != 1) fail(ErrorKind::domain, "one-dimensional scattering needs a d = 1 potential");
}

double max_abs_on(const Potential& p, double lo, double hi, int samples) {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) m = std::max(m, std::abs(p(lo + (hi - lo) * i / samples)));
  return m;
}

// Bound on int_{|x|>X} |v| from the edge values.
double tail_bound(const Potential& p, double X) {
  double edge = std::abs(p(X)) + std::abs(p(-X));
  if (std::isfinite(p.rho())) return edge * X / std::max(p.rho() - 1.0, 1e-3);
  // Exponential decay: estimate the rate from two edge samples.
  double inner = std::abs(p(X - 1.0)) + std::abs(p(-X + 1.0));
  if (edge == 0.0) return 0.0;
  double rate = inner > edge ? std::log(inner / edge) : 0.0;
  return rate > 0.1 ? edge / rate : edge * X;
}

// w = psi e^{-ikx} solves w'' = v w - 2ik w' with w(X) = 1, w'(X) = 0;
// then a = w + w' / (2ik) and b = -e^{2ikx} w' / (2ik) at x = -X.
struct JostIntegration {
  Complex w{1.0, 0.0};
  Complex dw{0.0, 0.0};
  double X = 0.0;
};

JostIntegration integrate_jost(const Potential& p, Complex k, const JostOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  JostIntegration out;
  out.X = opts.x_max > 0.0 ? opts.x_max : truncation_radius(p);
  State s{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  if (p.is_zero()) return out;
  const Complex two_ik = Complex(0.0, 2.0) * k;
  double lo = 0.0, hi = 0.0;
  auto rhs = [&](const State& y, State& dy, double x) {
    dy[0] = y[1];
    dy[1] = p(inside_segment(x, lo, hi)) * y[0] - two_ik * y[1];
  };
  std::vector<double> cuts{out.X};
  for (double b : p.breakpoints())
    if (b > -out.X && b < out.X) cuts.push_back(b);
  cuts.push_back(-out.X);
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  auto stepper = odeint::make_controlled(opts.tolerance, opts.tolerance, odeint::runge_kutta_fehlberg78<State>());
  const double dx0 = -std::min(0.05, 0.5 / (1.0 + std::abs(k)));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] - cuts[i + 1] <= 0.0) continue;
    lo = cuts[i + 1];
    hi = cuts[i];
    odeint::integrate_adaptive(stepper, rhs, s, cuts[i], cuts[i + 1], dx0);
  }
  out.w = s[0];
  out.dw = s[1];
  return out;
}

}  // namespace

double truncation_radius(const Potential& p) {
  if (p.is_zero()) return p.support_radius();
  const double R = p.support_radius();
  const double scale = std::max(1.0, max_abs_on(p, -R, R, 400));
  double X = R;
  const double cap = std::max(40.0 * R, 400.0);
  while (X < cap) {
    double edge = std::max(std::abs(p(X)), std::abs(p(-X)));
    if (edge < 1e-17 * scale) break;
    X += std::max(0.25 * R, 1.0);
  }
  return std::min(X, cap);
}

JostData jost_solve(const Potential& p, double k, const JostOptions& opts) {
  require_1d(p);
  if (!(k > 0.0)) fail(ErrorKind::domain, "jost_solve: k must be positive");
  if (std::isfinite(p.rho()) && p.rho() <= 1.0) fail(ErrorKind::domain, "jost_solve: potential must decay faster than 1/|x|");
  JostData d;
  d.k = k;
  if (p.is_zero()) return d;
  JostIntegration J = integrate_jost(p, Complex(k, 0.0), opts);
  const Complex two_ik(0.0, 2.0 * k);
  d.a = J.w + J.dw / two_ik;
  d.b = -std::exp(Complex(0.0, -2.0 * k * J.X)) * J.dw / two_ik;
  const double defect = std::abs(std::norm(d.a) - std::norm(d.b) - 1.0);
  const double tail = tail_bound(p, J.X) / (2.0 * k) * std::max(1.0, std::abs(d.a));
  d.estimated_error = defect + tail + 10.0 * opts.tolerance * std::max(1.0, std::abs(d.a));
  if (d.estimated_error > 1e-6 * std::max(1.0, std::abs(d.a)))
    throw AccuracyError("jost_solve: truncation or integration error too large at this momentum",
                        std::abs(d.a), d.estimated_error);
  return d;
}

Complex jost_a(const Potential& p, Complex k, const JostOptions& opts) {
  require_1d(p);
  if (k.imag() < 0.0) fail(ErrorKind::domain, "jost_a: need Im k >= 0");
  if (std::abs(k) == 0.0) fail(ErrorKind::domain, "jost_a: k = 0 is singular");
  if (p.is_zero()) return {1.0, 0.0};
  JostIntegration J = integrate_jost(p, k, opts);
  return J.w + J.dw / (Complex(0.0, 2.0) * k);
}

Complex perturbation_determinant_1d(const Potential& p, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorKind::domain, "boundary value needs lambda > 0");
  return jost_solve(p, std::sqrt(lambda)).a;
}

Complex perturbation_determinant_1d(const Potential& p, Complex z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) fail(ErrorKind::domain, "z must lie off [0, inf)");
  Complex k = std::sqrt(z);
  if (k.imag() < 0.0) k = -k;
  return jost_a(p, k);
}

std::vector<double> bound_states_1d(const Potential& p) {
  require_1d(p);
  if (p.is_zero()) return {};
  const double X = truncation_radius(p);
  // Finite-difference estimates bracket the roots of a(i kappa) (real-valued).
  const int n = 4000;
  const double h = 2.0 * X / (n + 1);
  std::vector<double> diag(n), off(n - 1, -1.0 / (h * h));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + p(-X + h * (i + 1));
  std::vector<double> kappas;
  for (double e : tridiagonal_eigenvalues(diag, off))
    if (e < 0.0) kappas.push_back(std::sqrt(-e));
  std::sort(kappas.begin(), kappas.end(), std::greater<>());

  auto f = [&](double kappa) { return jost_a(p, Complex(0.0, kappa)).real(); };
  auto tol = boost::math::tools::eps_tolerance<double>(48);
  auto refine = [&](double lo, double hi) {
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
  };

  std::vector<double> roots;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    double hi = i == 0 ? 1.5 * kappas[0] + 1.0 : 0.5 * (kappas[i] + kappas[i - 1]);
    double lo = i + 1 < kappas.size() ? 0.5 * (kappas[i] + kappas[i + 1]) : 0.5 * kappas[i];
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) continue;  // spurious grid level
    roots.push_back(refine(lo, hi));
  }
  // a(i kappa) -> 1 as kappa -> inf and changes sign at each simple root, so
  // the sign near kappa = 0 reveals a shallow state the box could not resolve.
  const double smallest = roots.empty() ? std::sqrt(max_abs_on(p, -X, X, 400)) + 1.0 : roots.back();
  double kappa_lo = std::min(1e-5, 1e-3 * smallest);
  double f_lo = f(kappa_lo);
  const bool expect_positive = roots.size() % 2 == 0;
  if ((f_lo > 0.0) != expect_positive) {
    double prev = kappa_lo, fprev = f_lo;
    const int steps = 60;
    for (int i = 1; i <= steps; ++i) {
      double kk = kappa_lo * std::pow(0.999 * smallest / kappa_lo, static_cast<double>(i) / steps);
      double fk = f(kk);
      if (fk * fprev <= 0.0) {
        roots.push_back(refine(prev, kk));
        break;
      }
      prev = kk;
      fprev = fk;
    }
  }
  std::vector<double> out;
  for (double kappa : roots) out.push_back(-kappa * kappa);
  std::sort(out.begin(), out.end());
  return out;
}

double SsfCurve::xi_negative(double lambda) const {
  int count = 0;
  for (double e : negative_part)
    if (e < lambda) ++count;
  return -static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Ssf1d

Ssf1d::Ssf1d(const Potential& p, const SsfOptions& opts) : potential_(p), opts_(opts) {
  require_1d(p);
  eigenvalues_ = bound_states_1d(p);
  if (p.is_zero()) {
    coefficients_ = {0.0, 0.0, 0.0, 0.0};
    k_top_ = 1.0;
    table_k_ = {opts.k_min, 1.0};
    table_xi_ = {0.0, 0.0};
    return;
  }
  for (int n = 0; n < 4; ++n) {
    try {
      coefficients_.push_back(ssf_coefficient(p, n).value);
    } catch (const Error&) {
      break;  // non-smooth potentials only provide the leading coefficient
    }
  }
  const double X = truncation_radius(p);
  const double vmax = max_abs_on(p, -X, X, 2000);
  k_top_ = std::max(30.0, 4.0 * std::sqrt(vmax) + 10.0);

  auto phase = [&](double k) { return std::arg(jost_solve(p, k, opts_.jost).a); };
  // Geometric grid, then bisection wherever a phase increment exceeds pi/2.
  const int base = 300;
  std::vector<double> ks, ph;
  for (int i = 0; i <= base; ++i) {
    double k = opts.k_min * std::pow(k_top_ / opts.k_min, static_cast<double>(i) / base);
    ks.push_back(k);
    ph.push_back(phase(k));
  }
  auto wrap = [](double d) { return std::remainder(d, 2.0 * kPi); };
  for (int pass = 0; pass < 30; ++pass) {
    std::vector<double> nk{ks[0]}, nph{ph[0]};
    bool refined = false;
    for (std::size_t i = 1; i < ks.size(); ++i) {
      if (std::abs(wrap(ph[i] - ph[i - 1])) > kPi / 4.0 && ks[i] - ks[i - 1] > 1e-9 * ks[i]) {
        double km = 0.5 * (ks[i] + ks[i - 1]);
        nk.push_back(km);
        nph.push_back(phase(km));
        refined = true;
      }
      nk.push_back(ks[i]);
      nph.push_back(ph[i]);
    }
    ks.swap(nk);
    ph.swap(nph);
    if (!refined) break;
  }
  // Unwrap from the top down and anchor at k_top to the series branch.
  std::vector<double> unwrapped(ph.size());
  unwrapped.back() = ph.back();
  for (std::size_t i = ph.size() - 1; i-- > 0;) unwrapped[i] = unwrapped[i + 1] + wrap(ph[i] - ph[i + 1]);
  const double top_ref = series(k_top_, static_cast<int>(coefficients_.size()));
  const double top = unwrapped.back() / kPi;
  const double shift = 2.0 * std::round((top_ref - top) / 2.0);
  table_k_ = ks;
  table_xi_.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) table_xi_[i] = unwrapped[i] / kPi + shift;
}

double Ssf1d::series(double k, int terms) const {
  double s = 0.0;
  const double inv2 = 1.0 / (k * k);
  double pw = 1.0 / k;
  for (int n = 0; n < terms && n < static_cast<int>(coefficients_.size()); ++n, pw *= inv2)
    s += coefficients_[static_cast<std::size_t>(n)] * pw;
  return s;
}

double Ssf1d::reference(double k) const {
  if (k >= k_top_) return series(k, static_cast<int>(coefficients_.size()));
  if (k <= table_k_.front()) return table_xi_.front();
  auto it = std::upper_bound(table_k_.begin(), table_k_.end(), k);
  std::size_t i = static_cast<std::size_t>(it - table_k_.begin());
  double t = (k - table_k_[i - 1]) / (table_k_[i] - table_k_[i - 1]);
  return table_xi_[i - 1] + t * (table_xi_[i] - table_xi_[i - 1]);
}

double Ssf1d::xi_k(double k) const {
  if (!(k > 0.0)) fail(ErrorKind::domain, "xi_k: k must be positive");
  if (potential_.is_zero()) return 0.0;
  const double principal = std::arg(jost_solve(potential_, k, opts_.jost).a) / kPi;
  const double ref = reference(k);
  return principal + 2.0 * std::round((ref - principal) / 2.0);
}

double Ssf1d::xi(double lambda) const {
  if (lambda > 0.0) return xi_k(std::sqrt(lambda));
  int count = 0;
  for (double e : eigenvalues_)
    if (e < lambda) ++count;
  return -static_cast<double>(count);
}

double Ssf1d::ln_abs_a(double k) const {
  if (potential_.is_zero()) return 0.0;
  JostData d = jost_solve(potential_, k, opts_.jost);
  // |a|^2 = 1 + |b|^2 for real v; log1p keeps accuracy when b is tiny.
  return 0.5 * std::log1p(std::norm(d.b));
}

ZeroEnergy1d Ssf1d::zero_energy() const {
  ZeroEnergy1d z;
  z.bound_states = static_cast<int>(eigenvalues_.size());
  if (potential_.is_zero()) {
    z.resonant = true;
    z.amplitude_ratio = 0.1;
    z.matches_minus_n = true;
    return z;
  }
  const double k1 = 1e-3, k2 = 1e-4;
  const double m1 = std::abs(jost_solve(potential_, k1, opts_.jost).a) * k1;
  const double m2 = std::abs(jost_solve(potential_, k2, opts_.jost).a) * k2;
  z.amplitude_ratio = m2 / m1;
  z.resonant = z.amplitude_ratio < 0.5;
  Extrapolation e = richardson([&](double k) { return xi_k(k); }, 0.04, 4);
  z.xi_at_zero = e.value;
  z.extrapolation_error = e.error;
  const double tol = std::max(1e-3, 10.0 * e.error);
  z.matches_minus_n = std::abs(z.xi_at_zero + z.bound_states) < tol;
  z.matches_minus_n_plus_half = std::abs(z.xi_at_zero + z.bound_states - 0.5) < tol;
  return z;
}

SsfCurve ssf_1d(const Potential& p, const std::vector<double>& lambda_grid, const SsfOptions& opts) {
  require_1d(p);
  if (lambda_grid.empty()) fail(ErrorKind::usage, "ssf_1d: empty grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) fail(ErrorKind::domain, "ssf_1d: grid must be positive");
    if (i && !(lambda_grid[i] > lambda_grid[i - 1])) fail(ErrorKind::domain, "ssf_1d: grid must be increasing");
  }
  SsfCurve c;
  c.lambda_grid = lambda_grid;
  if (opts.refine) {
    Ssf1d s(p, opts);
    c.negative_part = s.eigenvalues();
    for (double l : lambda_grid) {
      c.xi.push_back(s.xi(l));
      c.determinant.push_back(p.is_zero() ? Complex(1.0, 0.0) : jost_solve(p, std::sqrt(l), opts.jost).a);
    }
    c.branch_anchor = "xi -> 0 as lambda -> inf: phase unwrapped on a refined momentum grid and anchored to the "
                      "high-energy series at k = " + std::to_string(s.top_k());
    return c;
  }
  // Unwrap on the caller's grid; the top point is anchored to the series.
  c.negative_part = bound_states_1d(p);
  std::vector<double> ph;
  for (double l : lambda_grid) {
    Complex a = p.is_zero() ? Complex(1.0, 0.0) : jost_solve(p, std::sqrt(l), opts.jost).a;
    c.determinant.push_back(a);
    ph.push_back(std::arg(a));
  }
  std::vector<double> un(ph.size());
  un.back() = ph.back();
  for (std::size_t i = ph.size() - 1; i-- > 0;) {
    double d = std::remainder(ph[i] - ph[i + 1], 2.0 * kPi);
    if (std::abs(d) > kPi / 2.0) fail(ErrorKind::refinement, "ssf_1d: grid too coarse for phase unwrapping");
    un[i] = un[i + 1] + d;
  }
  double ref = 0.0;
  if (!p.is_zero()) ref = ssf_coefficient(p, 0).value / std::sqrt(lambda_grid.back());
  const double shift = 2.0 * std::round((ref - un.back() / kPi) / 2.0);
  for (double u : un) c.xi.push_back(u / kPi + shift);
  c.branch_anchor = "xi -> 0 as lambda -> inf: phase unwrapped on the given grid, top point anchored to the leading term";
  return c;
}

ScatteringMatrix smatrix_1d(const Potential& p, double k, const JostOptions& opts) {
  JostData d = jost_solve(p, k, opts);
  ScatteringMatrix m;
  const Complex t = 1.0 / d.a;
  const Complex r_left = d.b / d.a;
  const Complex r_right = -std::conj(d.b) / d.a;
  m.s = {{{t, r_right}, {r_left, t}}};
  m.det = t * t - r_left * r_right;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex e = 0.0;
      for (int l = 0; l < 2; ++l) e += std::conj(m.s[l][i]) * m.s[l][j];
      if (i == j) e -= 1.0;
      m.unitarity_defect = std::max(m.unitarity_defect, std::abs(e));
    }
  if (m.unitarity_defect > 1e-6)
    throw AccuracyError("smatrix_1d: scattering matrix is not unitary to tolerance", m.unitarity_defect,
                        m.unitarity_defect);
  return m;
}

// ---------------------------------------------------------------------------
// Eikonal amplitudes on a Chebyshev-Lobatto grid.

namespace {

struct Chebyshev {
  int n;  // polynomial degree; n + 1 nodes
  double half_width;
  std::vector<double> nodes;  // ascending in x

  Chebyshev(int degree, double X) : n(degree), half_width(X) {
    for (int j = n; j >= 0; --j) nodes.push_back(X * std::cos(kPi * j / n));
  }

  // Values at ascending nodes -> coefficients c_0..c_n.
  std::vector<double> coefficients(const std::vector<double>& values) const {
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) {
        double f = values[static_cast<std::size_t>(n - j)];  // node j is cos(pi j / n)
        double w = (j == 0 || j == n) ? 0.5 : 1.0;
        s += w * f * std::cos(kPi * k * j / n);
      }
      c[static_cast<std::size_t>(k)] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[static_cast<std::size_t>(n)] *= 0.5;
    return c;
  }

  std::vector<double> values(const std::vector<double>& c) const {
    std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
    for (int j = 0; j <= n; ++j) {
      double s = 0.0;
      for (int k = 0; k <= n; ++k) s += c[static_cast<std::size_t>(k)] * std::cos(kPi * k * j / n);
      v[static_cast<std::size_t>(n - j)] = s;
    }
    return v;
  }

  // d/dx in coefficient space (x = X t).
  std::vector<double> derivative(const std::vector<double>& c) const {
    std::vector<double> d(c.size() + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
      auto K = static_cast<std::size_t>(k);
      d[K] = d[K + 2] + 2.0 * (k + 1) * c[K + 1];
    }
    d[0] *= 0.5;
    d.resize(c.size());
    for (double& x : d) x /= half_width;
    return d;
  }

  // Antiderivative vanishing at x = -X.
  std::vector<double> integral(const std::vector<double>& c) const {
    std::vector<double> I(c.size() + 1, 0.0);
    auto at = [&](int k) { return k < static_cast<int>(c.size()) && k >= 0 ? c[static_cast<std::size_t>(k)] : 0.0; };
    for (int k = 1; k <= n; ++k) {
      double ckm1 = k == 1 ? 2.0 * at(0) : at(k - 1);
      I[static_cast<std::size_t>(k)] = (ckm1 - at(k + 1)) / (2.0 * k);
    }
    // Fix the constant so the value at t = -1 is zero: T_k(-1) = (-1)^k.
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += (k % 2 ? -1.0 : 1.0) * I[static_cast<std::size_t>(k)];
    I[0] = -s;
    I.resize(c.size());
    for (double& x : I) x *= half_width;
    return I;
  }
};

}  // namespace

WkbAmplitudes wkb_amplitudes_1d(const Potential& p, int max_n, int omega, int nodes) {
  require_1d(p);
  if (max_n < 0 || max_n > 4) fail(ErrorKind::domain, "wkb_amplitudes_1d: need 0 <= N <= 4");
  if (omega != 1 && omega != -1) fail(ErrorKind::domain, "wkb_amplitudes_1d: omega must be +1 or -1");
  if (std::isfinite(p.rho()) && p.rho() <= 1.0) fail(ErrorKind::domain, "wkb_amplitudes_1d: need rho > 1");
  if (nodes < 16) fail(ErrorKind::domain, "wkb_amplitudes_1d: too few nodes");
  const double X = p.is_zero() ? 1.0 : truncation_radius(p);
  Chebyshev cheb(nodes, X);
  WkbAmplitudes out;
  out.omega = omega;
  out.x = cheb.nodes;
  std::vector<double> v(cheb.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p(cheb.nodes[i]);
  out.b.emplace_back(cheb.nodes.size(), 1.0);
  for (int n = 0; n < max_n; ++n) {
    const auto& prev = out.b.back();
    auto c = cheb.coefficients(prev);
    auto second = cheb.values(cheb.derivative(cheb.derivative(c)));
    std::vector<double> src(prev.size());
    for (std::size_t i = 0; i < src.size(); ++i) src[i] = -second[i] + v[i] * prev[i];
    // omega = +1: integrate from -X up to x; omega = -1: from x up to +X.
    auto I = cheb.values(cheb.integral(cheb.coefficients(src)));
    if (omega == -1) {
      const double total = I.back();
      for (double& x : I) x = total - x;
    }
    out.b.push_back(std::move(I));
  }
  for (std::size_t n = 0; n < out.b.size(); ++n) {
    const auto& b = out.b[n];
    double m = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      double x = out.x[i];
      if (omega * x <= -0.5 * X) m = std::max(m, std::abs(b[i]));
    }
    out.incoming_tail.push_back(m);
    out.outgoing_limit.push_back(omega == 1 ? b.back() : b.front());
  }
  return out;
}

}  // namespace ssf
