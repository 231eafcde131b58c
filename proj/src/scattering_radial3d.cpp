#include "ssf/scattering_radial3d.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "ssf/errors.hpp"
#include "ssf/numerics.hpp"

namespace ssf {

namespace {

constexpr double kPi = std::numbers::pi;

void require_radial(const Potential& p) {
  if (p.dim() != 3 || !p.spec().radial) fail(ErrorKind::domain, "partial waves need a radial d = 3 potential");
  if (std::isfinite(p.rho()) && p.rho() <= 2.0) fail(ErrorKind::domain, "partial waves need rho > 2");
}

double radial_max(const Potential& p, double R) {
  double m = 0.0;
  for (int i = 1; i <= 800; ++i) m = std::max(m, std::abs(p.radial_value(R * i / 800.0)));
  return m;
}

std::vector<double> radial_cuts(const Potential& p, double r0, double r1) {
  std::vector<double> cuts{r0};
  for (double b : p.breakpoints())
    if (b > r0 && b < r1) cuts.push_back(b);
  cuts.push_back(r1);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// log((2l+1)!!)
double log_double_factorial(int l) {
  return std::lgamma(2.0 * l + 2.0) - l * std::log(2.0) - std::lgamma(l + 1.0);
}

}  // namespace

double radial_truncation_radius(const Potential& p) {
  if (p.is_zero()) return p.support_radius();
  const double R = p.support_radius();
  const double scale = std::max(1.0, radial_max(p, R));
  double r = R;
  const double cap = std::max(40.0 * R, 400.0);
  while (r < cap && std::abs(p.radial_value(r)) >= 1e-17 * scale) r += std::max(0.25 * R, 0.5);
  return std::min(r, cap);
}

void riccati_bessel(double x, int l_max, std::vector<double>& jhat, std::vector<double>& nhat) {
  if (!(x > 0.0)) fail(ErrorKind::domain, "riccati_bessel: x must be positive");
  const auto L = static_cast<std::size_t>(l_max);
  jhat.assign(L + 1, 0.0);
  nhat.assign(L + 1, 0.0);
  const double s = std::sin(x), c = std::cos(x);
  nhat[0] = -c;
  if (L >= 1) nhat[1] = -c / x - s;
  for (std::size_t l = 1; l < L; ++l) {
    nhat[l + 1] = (2.0 * l + 1.0) / x * nhat[l] - nhat[l - 1];
    if (!std::isfinite(nhat[l + 1])) {
      for (std::size_t m = l + 1; m <= L; ++m) nhat[m] = -HUGE_VAL;
      break;
    }
  }
  // Miller's downward recurrence, normalized against j0 or j1.
  const double top = std::max(static_cast<double>(l_max), x);
  const int start = static_cast<int>(top + std::sqrt(160.0 * (top + 1.0))) + 10;
  double f_up = 0.0, f = 1e-300;  // f_{l+1}, f_l
  for (int l = start; l > 0; --l) {
    const double f_down = (2.0 * l + 1.0) / x * f - f_up;
    f_up = f;
    f = f_down;
    if (l - 1 <= l_max) jhat[static_cast<std::size_t>(l - 1)] = f;
    if (std::abs(f) > 1e200) {
      f *= 1e-200;
      f_up *= 1e-200;
      for (auto m = static_cast<std::size_t>(l - 1); m <= L; ++m) jhat[m] *= 1e-200;
    }
  }
  const double j0 = s, j1 = s / x - c;
  double scale;
  if (std::abs(j0) >= std::abs(j1) || L == 0) scale = j0 / jhat[0];
  else scale = j1 / jhat[1];
  for (double& v : jhat) v *= scale;
}

int partial_wave_cutoff(const Potential& p, double k) {
  return static_cast<int>(std::ceil(k * p.support_radius())) + 8;
}

namespace {

// Variable-phase method for all waves at once:
//   delta_l' = -(1/k) v(r) [jhat_l(kr) cos delta_l - nhat_l(kr) sin delta_l]^2,
// plus one extra component accumulating the Born tail beyond L_max,
//   T' = -(1/k) v(r) [(kr)^2 - sum_{l <= L_max} (2l+1) jhat_l(kr)^2].
// Wave l is frozen at zero until its contribution could exceed ~1e-22.
struct PhaseSystem {
  const Potential& p;
  double k;
  int l_sum;
  int l_total;
  std::vector<double> x_on;  // activation argument per wave
  double lo = 0.0, hi = 0.0;  // current segment
  mutable std::vector<double> jh, nh;

  PhaseSystem(const Potential& pot, double kk, int lsum, int ltotal, double vmax)
      : p(pot), k(kk), l_sum(lsum), l_total(ltotal) {
    const double strength = std::max(vmax, 1e-300) / (k * k);
    for (int l = 0; l <= l_total; ++l) {
      double lx = (std::log(1e-22) + std::log(2.0 * l + 3.0) + 2.0 * log_double_factorial(l) - std::log(strength)) /
                  (2.0 * l + 3.0);
      x_on.push_back(std::exp(lx));
    }
  }

  int active(double x) const {
    int l = -1;
    while (l + 1 <= l_total && x_on[static_cast<std::size_t>(l + 1)] <= x) ++l;
    return l;
  }

  void operator()(const std::vector<double>& y, std::vector<double>& dy, double r) const {
    dy.assign(y.size(), 0.0);
    const double x = k * r;
    const int la = active(x);
    if (la < 0) return;
    const double v = p.radial_value(inside_segment(r, lo, hi));
    if (v == 0.0) return;
    riccati_bessel(x, la, jh, nh);
    double sum = 0.0;
    for (int l = 0; l <= la; ++l) {
      auto L = static_cast<std::size_t>(l);
      double d = y[L];
      double w = jh[L] * std::cos(d) - (d == 0.0 ? 0.0 : nh[L] * std::sin(d));
      dy[L] = -v / k * w * w;
      if (l <= l_sum) sum += (2.0 * l + 1.0) * jh[L] * jh[L];
    }
    dy.back() = -v / k * (x * x - sum);
  }
};

}  // namespace

PhaseShiftTable phase_shift_table(const Potential& p, double k, int extra, const PhaseShiftOptions& opts) {
  require_radial(p);
  if (!(k > 0.0)) fail(ErrorKind::domain, "phase shifts need k > 0");
  PhaseShiftTable t;
  t.k = k;
  t.l_max = partial_wave_cutoff(p, k);
  const int total = t.l_max + std::max(extra, 0);
  t.delta.assign(static_cast<std::size_t>(total + 1), 0.0);
  if (p.is_zero()) return t;
  const double Rt = radial_truncation_radius(p);
  const double vmax = radial_max(p, Rt);
  PhaseSystem sys(p, k, t.l_max, total, vmax);
  std::vector<double> y(static_cast<std::size_t>(total + 2), 0.0);
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(opts.tolerance, opts.tolerance,
                                         odeint::runge_kutta_fehlberg78<std::vector<double>>());
  const double r0 = std::min(sys.x_on[0] / k, 1e-6);
  auto cuts = radial_cuts(p, r0, Rt);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    sys.lo = cuts[i];
    sys.hi = cuts[i + 1];
    odeint::integrate_adaptive(stepper, std::ref(sys), y, cuts[i], cuts[i + 1], std::min(0.01, 0.2 / k));
  }
  for (int l = 0; l <= total; ++l) t.delta[static_cast<std::size_t>(l)] = y[static_cast<std::size_t>(l)];
  t.born_tail = y.back();
  // Second-order Born correction relative to the tail scales like the
  // largest neglected phase.
  const double edge = std::abs(t.delta[static_cast<std::size_t>(t.l_max)]);
  t.tail_error = 10.0 * std::abs(t.born_tail) * std::min(1.0, edge) +
                 opts.tolerance * (t.l_max + 1.0) * (t.l_max + 1.0);
  return t;
}

double phase_shift(const Potential& p, int ell, double k, const PhaseShiftOptions& opts) {
  if (ell < 0) fail(ErrorKind::domain, "phase_shift: l must be non-negative");
  const int cutoff = partial_wave_cutoff(p, k);
  PhaseShiftTable t = phase_shift_table(p, k, std::max(0, ell - cutoff), opts);
  return t.delta[static_cast<std::size_t>(ell)];
}

double born_phase_shift(const Potential& p, int ell, double k) {
  require_radial(p);
  if (p.is_zero()) return 0.0;
  const double Rt = radial_truncation_radius(p);
  std::vector<double> jh, nh;
  auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    riccati_bessel(k * r, ell, jh, nh);
    double j = jh[static_cast<std::size_t>(ell)];
    return p.radial_value(r) * j * j;
  };
  double total = 0.0;
  auto cuts = radial_cuts(p, 0.0, Rt);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13);
  return -total / k;
}

double ssf_3d_value(const Potential& p, double lambda, const PhaseShiftOptions& opts) {
  if (lambda <= 0.0) {
    int count = 0;
    for (double e : eigenvalues_3d(p))
      if (e < lambda) ++count;
    return -static_cast<double>(count);
  }
  PhaseShiftTable t = phase_shift_table(p, std::sqrt(lambda), 0, opts);
  double s = t.born_tail;
  for (int l = 0; l <= t.l_max; ++l) s += (2.0 * l + 1.0) * t.delta[static_cast<std::size_t>(l)];
  return -s / kPi;
}

namespace {

// Regular radial solution at energy e from r_s to r_end; returns (u, u').
std::pair<double, double> regular_solution(const Potential& p, int ell, double e, double r_end) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double rs = 1e-4;
  const double c = (p.radial_value(rs) - e) / (2.0 * (2.0 * ell + 3.0));
  // u = r^{l+1} (1 + c r^2), scaled by rs^{-(l+1)}.
  State y{1.0 + c * rs * rs, ((ell + 1.0) * (1.0 + c * rs * rs) + 2.0 * c * rs * rs) / rs};
  const double cent = ell * (ell + 1.0);
  double lo = 0.0, hi = 0.0;
  auto rhs = [&](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (cent / (r * r) + p.radial_value(inside_segment(r, lo, hi)) - e) * s[0];
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_fehlberg78<State>());
  auto cuts = radial_cuts(p, rs, r_end);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    lo = cuts[i];
    hi = cuts[i + 1];
    odeint::integrate_adaptive(stepper, rhs, y, cuts[i], cuts[i + 1], 1e-4);
    // Keep magnitudes bounded for deep wells.
    double m = std::max(std::abs(y[0]), std::abs(y[1]));
    if (m > 1e100) {
      y[0] /= m;
      y[1] /= m;
    }
  }
  return {y[0], y[1]};
}

// Sign-definite matching function for bound states at energy -kappa^2:
// Wronskian of the regular solution with the decaying free solution.
double bound_state_mismatch(const Potential& p, int ell, double kappa, double Rt) {
  auto [u, du] = regular_solution(p, ell, -kappa * kappa, Rt);
  const double z = kappa * Rt;
  const double nu = ell + 0.5;
  const double K = boost::math::cyl_bessel_k(nu, z);
  const double Kp = -boost::math::cyl_bessel_k(nu - 1.0, z) - nu / z * K;
  // khat(z) = sqrt(z) K_nu(z) up to a positive constant.
  const double kh = std::sqrt(z) * K;
  const double khp = kappa * (0.5 / std::sqrt(z) * K + std::sqrt(z) * Kp);
  const double w = u * khp - du * kh;
  const double norm = std::hypot(u, du / std::max(kappa, 1.0)) * std::hypot(kh, khp / std::max(kappa, 1.0));
  return w / norm;
}

}  // namespace

std::vector<RadialBoundState> bound_states_3d(const Potential& p) {
  require_radial(p);
  std::vector<RadialBoundState> out;
  if (p.is_zero()) return out;
  const double Rt = radial_truncation_radius(p);
  const double Rbox = Rt + 20.0;
  const int n = 4000;
  const double h = Rbox / (n + 1);
  const double kappa_cap = std::sqrt(radial_max(p, Rt)) + 1.0;
  auto tol = boost::math::tools::eps_tolerance<double>(48);
  for (int ell = 0;; ++ell) {
    std::vector<double> diag(n), off(n - 1, -1.0 / (h * h));
    for (int i = 0; i < n; ++i) {
      double r = h * (i + 1);
      diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + ell * (ell + 1.0) / (r * r) + p.radial_value(r);
    }
    std::vector<double> kappas;
    for (double e : tridiagonal_eigenvalues(diag, off))
      if (e < 0.0) kappas.push_back(std::sqrt(-e));
    std::sort(kappas.begin(), kappas.end(), std::greater<>());
    auto f = [&](double kappa) { return bound_state_mismatch(p, ell, kappa, Rt); };
    auto refine = [&](double lo, double hi) {
      std::uintmax_t iters = 100;
      auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
      return 0.5 * (r.first + r.second);
    };
    std::vector<double> roots;
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      double hi = i == 0 ? std::max(1.5 * kappas[0], kappa_cap) : 0.5 * (kappas[i] + kappas[i - 1]);
      double lo = i + 1 < kappas.size() ? 0.5 * (kappas[i] + kappas[i + 1]) : 0.5 * kappas[i];
      if (f(lo) * f(hi) > 0.0) continue;
      roots.push_back(refine(lo, hi));
    }
    // Parity of sign changes between kappa_cap and a small kappa reveals a
    // shallow state the box missed.
    const double f_cap = f(kappa_cap);
    const double smallest = roots.empty() ? kappa_cap : roots.back();
    const double k_lo = std::min(1e-4, 1e-3 * smallest);
    double fprev = f(k_lo);
    if ((fprev * f_cap > 0.0) != (roots.size() % 2 == 0)) {
      double prev = k_lo;
      for (int i = 1; i <= 60; ++i) {
        double kk = k_lo * std::pow(0.999 * smallest / k_lo, i / 60.0);
        double fk = f(kk);
        if (fk * fprev <= 0.0) {
          roots.push_back(refine(prev, kk));
          break;
        }
        prev = kk;
        fprev = fk;
      }
    }
    if (roots.empty()) break;
    for (double kappa : roots) out.push_back({ell, -kappa * kappa, 2 * ell + 1});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return out;
}

std::vector<double> eigenvalues_3d(const Potential& p) {
  std::vector<double> e;
  for (const auto& s : bound_states_3d(p))
    for (int m = 0; m < s.multiplicity; ++m) e.push_back(s.energy);
  std::sort(e.begin(), e.end());
  return e;
}

SsfCurve ssf_3d(const Potential& p, const std::vector<double>& lambda_grid, const PhaseShiftOptions& opts) {
  require_radial(p);
  if (lambda_grid.empty()) fail(ErrorKind::usage, "ssf_3d: empty grid");
  SsfCurve c;
  c.lambda_grid = lambda_grid;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) fail(ErrorKind::domain, "ssf_3d: grid must be positive");
    if (i && !(lambda_grid[i] > lambda_grid[i - 1])) fail(ErrorKind::domain, "ssf_3d: grid must be increasing");
    c.xi.push_back(ssf_3d_value(p, lambda_grid[i], opts));
  }
  c.negative_part = eigenvalues_3d(p);
  c.branch_anchor = "variable-phase shifts start at zero at the origin, which selects delta_l -> 0 as k -> inf";
  return c;
}

double regularized_ssf_3d(const Potential& p, double lambda, const PhaseShiftOptions& opts) {
  if (!(lambda > 0.0)) fail(ErrorKind::domain, "regularized_ssf_3d: lambda must be positive");
  const double born = p.is_zero() ? 0.0 : integral_of_v(p) / (4.0 * kPi * kPi) * std::sqrt(lambda);
  return ssf_3d_value(p, lambda, opts) - born;
}

std::complex<double> smatrix_det_3d(const Potential& p, double k, const PhaseShiftOptions& opts) {
  PhaseShiftTable t = phase_shift_table(p, k, 10, opts);
  double s = 0.0;
  for (std::size_t l = 0; l < t.delta.size(); ++l) s += (2.0 * l + 1.0) * t.delta[l];
  return std::polar(1.0, 2.0 * s);
}

double scattering_length(const Potential& p) {
  require_radial(p);
  if (p.is_zero()) return 0.0;
  const double Rt = radial_truncation_radius(p);
  auto [u, du] = regular_solution(p, 0, 0.0, Rt);
  if (du == 0.0) return HUGE_VAL;
  return Rt - u / du;
}

LevinsonReport levinson_check_3d(const Potential& p, const PhaseShiftOptions& opts) {
  require_radial(p);
  LevinsonReport rep;
  rep.bound_states = static_cast<int>(eigenvalues_3d(p).size());
  rep.scattering_length = scattering_length(p);
  rep.resonant = !std::isfinite(rep.scattering_length) ||
                 std::abs(rep.scattering_length) > 1e3 * std::max(1.0, p.support_radius());
  // Richardson in k = sqrt(lambda) over lambda in [1e-3, 1e-1].
  Extrapolation e = richardson([&](double k) { return ssf_3d_value(p, k * k, opts); }, std::sqrt(0.1), 4);
  rep.xi_at_zero = e.value;
  rep.extrapolation_error = e.error;
  rep.applicable = !rep.resonant;
  rep.pass = rep.applicable && std::abs(rep.xi_at_zero + rep.bound_states) < std::max(1e-2, 10.0 * e.error);
  return rep;
}

}  // namespace ssf
