#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/trace_lab.hpp"

using namespace ssf;

namespace {

constexpr double kPi = std::numbers::pi;

// One model per potential; the xi memo makes repeated quadratures cheap.
const SsfModel& pt_model() {
  static const SsfModel m(Potential::poschl_teller(1));
  return m;
}

const SsfModel& zero_model() {
  static const SsfModel m(Potential::zero(1));
  return m;
}

double relative(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("grid oracle: free Dirichlet box and the reflectionless well") {
  GridOracle free = build_grid_oracle(Potential::zero(1), 10.0, 0.01);
  REQUIRE(free.channels.size() == 1);
  const auto& e0 = free.channels[0].eigenvalues;
  CHECK(std::is_sorted(e0.begin(), e0.end()));
  CHECK(e0[0] == doctest::Approx(std::pow(kPi / 20.0, 2)).epsilon(1e-4));
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(e0[static_cast<std::size_t>(n - 1)] - std::pow(kPi * n / 20.0, 2)) < 1e-4);

  GridOracle pt = build_grid_oracle(Potential::poschl_teller(1), 15.0, 0.01);
  CHECK(pt.channels[0].eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-3));

  GridOracle wide = build_grid_oracle(Potential::poschl_teller(1), 40.0, 0.02);
  auto count = [](const std::vector<double>& e) { return std::count_if(e.begin(), e.end(), [](double x) { return x <= 1.0; }); };
  const auto& c = wide.channels[0];
  const double estimate = static_cast<double>(count(c.free_eigenvalues) - count(c.eigenvalues));
  CHECK(std::abs(estimate - (-0.5)) <= 0.5 + 1e-12);
  // The counting function jumps by integers; average over a window around lambda = 1 for a finer estimate.
  double avg = 0.0;
  const int samples = 41;
  for (int i = 0; i < samples; ++i) {
    const double cut = 0.8 + 0.4 * i / (samples - 1);
    auto below = [&](const std::vector<double>& e) {
      return static_cast<double>(std::count_if(e.begin(), e.end(), [&](double x) { return x <= cut; }));
    };
    avg += below(c.free_eigenvalues) - below(c.eigenvalues);
  }
  CHECK(avg / samples == doctest::Approx(-0.5).epsilon(0.2));

  CHECK_THROWS_AS(build_grid_oracle(Potential::zero(1), 100.0, 0.001), Error);
  CHECK_THROWS_AS(build_grid_oracle(Potential::zero(1), -1.0, 0.01), Error);
}

TEST_CASE("heat trace by three routes") {
  const SsfModel& m = pt_model();
  HeatTrace small = heat_trace_diff(m, 0.01);
  CHECK(4.0 * std::sqrt(0.01 / (4.0 * kPi)) == doctest::Approx(0.11284).epsilon(1e-4));
  CHECK(small.via_ssf.value == doctest::Approx(small.via_oracle.value).epsilon(0.02));
  CHECK(small.via_ssf.value == doctest::Approx(small.via_series.value).epsilon(0.02));
  CHECK(small.via_series.value == doctest::Approx(small.via_oracle.value).epsilon(0.02));
  for (double t : {0.05, 0.2, 1.0}) {
    HeatTrace h = heat_trace_diff(m, t);
    CAPTURE(t);
    CHECK(h.via_ssf.value == doctest::Approx(h.via_oracle.value).epsilon(0.02));
    CHECK(std::abs(h.via_ssf.value - h.via_oracle.value) <= h.via_ssf.error + h.via_oracle.error + 1e-4 * std::abs(h.via_ssf.value));
  }
  // Bound-state dominance at t = 5: e^{5} from lambda_1 = -1.
  HeatTrace big = heat_trace_diff(m, 5.0);
  CHECK(big.via_ssf.value == doctest::Approx(big.via_oracle.value).epsilon(1e-3));
  CHECK(big.via_ssf.value == doctest::Approx(std::exp(5.0)).epsilon(0.01));

  HeatTrace zero = heat_trace_diff(zero_model(), 0.1);
  CHECK(zero.via_ssf.value == 0.0);
  CHECK(zero.via_series.value == 0.0);
  CHECK(std::abs(zero.via_oracle.value) < 1e-12);
  CHECK_THROWS_AS(heat_trace_diff(m, 0.0), Error);
}

TEST_CASE("resolvent trace by three routes") {
  const SsfModel& m = pt_model();
  const double r0 = resolvent_coefficient(m.potential(), 0, 1).value;
  const double r1 = resolvent_coefficient(m.potential(), 1, 1).value;
  ResolventTrace far = resolvent_trace_diff(m, {-100.0, 0.0}, 1);
  CHECK(far.via_series.value.real() == doctest::Approx(r0 * std::pow(100.0, -1.5) + r1 * std::pow(100.0, -2.5)).epsilon(1e-12));
  CHECK(relative(far.via_series.value, far.via_ssf.value) < 1e-3);
  for (double theta : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
    ResolventTrace r = resolvent_trace_diff(m, std::polar(100.0, theta), 1);
    CAPTURE(theta);
    CHECK(relative(r.via_series.value, r.via_ssf.value) < 1e-3);
  }
  // Near the cut only the SSF and grid routes are meaningful.
  ResolventTrace near = resolvent_trace_diff(m, {5.0, 0.5}, 1);
  CHECK(std::abs(near.via_ssf.value - near.via_oracle.value) <= near.via_oracle.error + near.via_ssf.error + 1e-6);
  CHECK(relative(near.via_oracle.value, near.via_ssf.value) < 1e-2);

  ResolventTrace zero = resolvent_trace_diff(zero_model(), {-4.0, 1.0}, 1);
  CHECK(std::abs(zero.via_ssf.value) == 0.0);
  CHECK(std::abs(zero.via_series.value) == 0.0);
  CHECK_THROWS_AS(resolvent_trace_diff(m, {-1.0, 0.0}, 1), Error);
  CHECK_THROWS_AS(resolvent_trace_diff(m, {3.0, 0.0}, 1), Error);
}

TEST_CASE("integer-order identities") {
  const SsfModel& m = pt_model();
  IdentityReport one = trace_identity_integer(m, 1);
  CHECK(one.pass);
  CHECK(one.lhs_total() == doctest::Approx(0.0).epsilon(1e-4));
  double integral = 0.0, eig = 0.0;
  for (const auto& piece : one.lhs) (piece.name == "eigenvalue_sum" ? eig : integral) += piece.value;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(eig == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(trace_identity_integer(m, 2).pass);
  CHECK(std::abs(trace_identity_integer(m, 2).residual) < 1e-4);

  IdentityReport zero = trace_identity_integer(zero_model(), 1);
  CHECK(zero.pass);
  CHECK(zero.residual == 0.0);
  CHECK_THROWS_AS(trace_identity_integer(m, 0), Error);
}

TEST_CASE("half-integer identities") {
  const SsfModel& m = pt_model();
  IdentityReport zeroth = trace_identity_half(m, 0);
  CHECK(zeroth.rhs == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(std::abs(zeroth.residual) < 1e-4);
  CHECK(zeroth.pass);
  IdentityReport first = trace_identity_half(m, 1);
  CHECK(first.rhs == doctest::Approx(-2.0 / 3.0).epsilon(1e-9));
  CHECK(first.pass);
  IdentityReport none = trace_identity_half(zero_model(), 0);
  CHECK(none.pass);
  CHECK(none.residual == 0.0);

  SsfModel gauss(Potential::gaussian_well(2.0, 1.0));
  for (int n : {0, 1}) CHECK(std::abs(trace_identity_half(gauss, n).residual) < 1e-3);
  CHECK_THROWS_AS(trace_identity_half(SsfModel(Potential::gaussian_well(1.0, 1.0, 3)), 0), Error);
}

TEST_CASE("identity residuals shrink with the tolerance until they reach the budget") {
  const SsfModel& m = pt_model();
  for (int n : {1, 2}) {
    for (double tol = 1e-2; tol >= 1e-5; tol /= 2.0) {
      IdentityOptions loose{tol}, tight{tol / 2.0};
      IdentityReport a = trace_identity_integer(m, n, loose);
      IdentityReport b = trace_identity_integer(m, n, tight);
      CAPTURE(n);
      CAPTURE(tol);
      CHECK(std::abs(a.residual) <= tol);
      CHECK(std::abs(b.residual) <= std::max(0.5 * std::abs(a.residual), b.error_budget));
    }
  }
}

TEST_CASE("Birman-Krein and Levinson in one dimension") {
  std::vector<double> grid;
  for (int i = 0; i < 30; ++i) grid.push_back(0.1 * std::pow(1000.0, i / 29.0));
  IdentityReport bk = birman_krein_check(pt_model(), grid);
  CHECK(bk.pass);
  CHECK(bk.residual < 1e-6);
  CHECK(birman_krein_check(zero_model(), grid).residual == 0.0);

  IdentityReport lev = levinson_check(pt_model());
  CHECK(lev.rhs == -1.0);
  CHECK(lev.pass);
  IdentityReport generic = levinson_check(SsfModel(Potential::gaussian_well(2.0, 1.0)));
  CHECK(generic.rhs == doctest::Approx(-0.5));
  CHECK(generic.pass);
}

TEST_CASE("perturbation determinant on the grid") {
  GridOracle grid = build_grid_oracle(Potential::poschl_teller(1), 15.0, 0.01);
  const double kappa = std::sqrt(2.0);
  CHECK(std::abs(determinant_oracle(grid, {-2.0, 0.0}) - (kappa - 1.0) / (kappa + 1.0)) < 1e-3);
  GridOracle free = build_grid_oracle(Potential::zero(1), 10.0, 0.02);
  CHECK(std::abs(determinant_oracle(free, {1.0, 1.0}) - 1.0) < 1e-14);

  LogDerivativeCheck at = log_derivative_check(Potential::poschl_teller(1), grid, {1.0, 1.0});
  CHECK(at.relative_error < 1e-3);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> re(-5.0, 5.0), im(0.5, 4.0);
  for (int i = 0; i < 5; ++i) {
    const std::complex<double> z(re(rng), (i % 2 ? 1.0 : -1.0) * im(rng));
    LogDerivativeCheck c = log_derivative_check(Potential::poschl_teller(1), grid, z);
    CAPTURE(z);
    CHECK(c.relative_error < 1e-3);
  }
}

TEST_CASE("odd-dimension purity and asymptotic constants") {
  const SsfModel& m = pt_model();
  PurityFit fit = odd_dimension_purity(m, {0.01, 0.02, 0.05, 0.1, 0.2});
  CHECK(std::abs(fit.constant) <= std::max(fit.fit_error, 1e-6));
  CHECK(std::abs(fit.linear) <= std::max(fit.fit_error, 1e-5));
  AsymptoticConstants ac = asymptotic_constants(m, 2);
  CHECK(std::abs(ac.gamma) < 1e-6);
  REQUIRE(ac.c.size() == 2);
  for (std::size_t i = 0; i < ac.c.size(); ++i) CHECK(std::abs(ac.c[i]) < 1e-4);
}

TEST_CASE("upper incomplete gamma for negative orders") {
  // Gamma(0, x) = E_1(x); Gamma(-1/2, x) = 2 e^{-x} / sqrt(x) - 2 sqrt(pi) erfc(sqrt(x)).
  CHECK(upper_incomplete_gamma(-0.5, 2.0) ==
        doctest::Approx(2.0 * std::exp(-2.0) / std::sqrt(2.0) - 2.0 * std::sqrt(kPi) * std::erfc(std::sqrt(2.0))).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(1.5, 0.7) == doctest::Approx(boost::math::tgamma(1.5, 0.7)).epsilon(1e-13));
  // Gamma(a + 1, x) = a Gamma(a, x) + x^a e^{-x}.
  for (double a : {-2.5, -1.5, -0.5}) {
    const double x = 3.0;
    CHECK(upper_incomplete_gamma(a + 1.0, x) ==
          doctest::Approx(a * upper_incomplete_gamma(a, x) + std::pow(x, a) * std::exp(-x)).epsilon(1e-12));
  }
}
