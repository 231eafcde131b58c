#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/potential.hpp"

using namespace ssf;

namespace {

constexpr double kPi = std::numbers::pi;

Coefficient q(long a, long b = 1) { return Coefficient(mpq_class(a, b)); }

double jet_at(const Potential& p, double x, const MultiIndex& k, int order) {
  return eval_jet(p, Point{x, 0.0, 0.0}, order).at(k);
}

}  // namespace

TEST_CASE("jets of the named families at the origin") {
  Potential pt = Potential::poschl_teller(1);
  CHECK(jet_at(pt, 0.0, MultiIndex(0), 0) == doctest::Approx(-2.0));
  CHECK(jet_at(pt, 0.0, MultiIndex(1), 1) == doctest::Approx(0.0));
  Potential g = Potential::gaussian_well(1.0, 1.0);
  CHECK(jet_at(g, 0.0, MultiIndex(2), 2) == doctest::Approx(2.0));
}

TEST_CASE("odd derivatives of even potentials vanish at the origin") {
  for (const Potential& p : {Potential::poschl_teller(1), Potential::poschl_teller(2),
                             Potential::gaussian_well(2.0, 0.7)}) {
    auto jet = eval_jet(p, Point{0.0, 0.0, 0.0}, 9);
    for (int k = 1; k <= 9; k += 2) CHECK(std::abs(jet.at(MultiIndex(k))) < 1e-12);
  }
}

TEST_CASE("named-family jets agree with finite differences") {
  Potential p = Potential::poschl_teller(2);
  const double x = 0.37, h = 1e-4;
  auto jet = eval_jet(p, Point{x, 0.0, 0.0}, 3);
  for (int k = 1; k <= 3; ++k) {
    const MultiIndex lower(k - 1);
    double fd = (jet_at(p, x + h, lower, k - 1) - jet_at(p, x - h, lower, k - 1)) / (2 * h);
    CHECK(jet.at(MultiIndex(k)) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("expression potentials match the named family") {
  Potential named = Potential::poschl_teller(1);
  Potential expr = Potential::from_expression("-2/cosh(x)^2", 1, kInfiniteDecay, 8.0);
  for (double x : {-1.3, 0.0, 0.4, 2.5}) {
    auto a = eval_jet(named, Point{x, 0, 0}, 6);
    auto b = eval_jet(expr, Point{x, 0, 0}, 6);
    for (int k = 0; k <= 6; ++k) CHECK(b.at(MultiIndex(k)) == doctest::Approx(a.at(MultiIndex(k))).epsilon(1e-11));
  }
  Potential three = Potential::from_expression("-c*exp(-r^2)", 3, kInfiniteDecay, 6.0, {{"c", 2.0}});
  auto jet = eval_jet(three, Point{0.3, 0.2, -0.1}, 2);
  const double r2 = 0.09 + 0.04 + 0.01;
  CHECK(jet.at(MultiIndex()) == doctest::Approx(-2.0 * std::exp(-r2)));
  CHECK(jet.at(MultiIndex(0, 1, 0)) == doctest::Approx(2.0 * 2.0 * 0.2 * std::exp(-r2)));
}

TEST_CASE("integrated densities for Poschl-Teller") {
  Potential pt = Potential::poschl_teller(1);
  JetPoly v = JetPoly::v(1);
  DensityIntegral g1 = integrate_density(pt, -v);
  CHECK(g1.value == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(g1.abs_error_estimate >= 0.0);
  DensityIntegral g2 = integrate_density(pt, v * v * q(1, 2) - v.laplacian() * q(1, 6));
  CHECK(g2.value == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
  CHECK(integrate_density(pt, JetPoly(1)).value == 0.0);
  CHECK(integrate_density(Potential::zero(1), v).value == 0.0);
}

TEST_CASE("integral of v in closed form") {
  CHECK(integral_of_v(Potential::poschl_teller(1)) == doctest::Approx(-4.0).epsilon(1e-10));
  CHECK(integral_of_v(Potential::poschl_teller(2)) == doctest::Approx(-12.0).epsilon(1e-10));
  CHECK(integral_of_v(Potential::gaussian_well(2.0, 1.5)) == doctest::Approx(-2.0 * 1.5 * std::sqrt(kPi)).epsilon(1e-10));
  CHECK(integral_of_v(Potential::square_well(3.0, 2.0)) == doctest::Approx(-12.0).epsilon(1e-8));
  CHECK(integral_of_v(Potential::exponential_well(1.0, 2.0)) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(integral_of_v(Potential::gaussian_well(1.0, 1.0, 3)) == doctest::Approx(-std::pow(kPi, 1.5)).epsilon(1e-9));
  CHECK(integral_of_v(Potential::square_well(3.0, 1.0, 3)) == doctest::Approx(-4.0 * kPi).epsilon(1e-8));
}

TEST_CASE("total derivatives integrate to zero") {
  JetPoly v = JetPoly::v(1);
  for (const Potential& p : {Potential::poschl_teller(1), Potential::gaussian_well(3.0, 0.8),
                             Potential::from_expression("-exp(-(x-0.3)^2)*(1+x)", 1, kInfiniteDecay, 8.0)}) {
    for (const JetPoly& q0 : {v, v * v, v * v.laplacian(), v * v * v}) {
      CHECK(std::abs(integrate_density(p, q0.derivative(0)).value) < 1e-8);
    }
  }
  Potential g3 = Potential::gaussian_well(2.0, 1.0, 3);
  JetPoly v3 = JetPoly::v(3);
  CHECK(std::abs(integrate_density(g3, v3.laplacian()).value) < 1e-8);
  CHECK(std::abs(integrate_density(g3, (v3 * v3).laplacian()).value) < 1e-8);
}

TEST_CASE("decay of the named families") {
  Potential pt = Potential::poschl_teller(1);
  double worst = 0.0;
  for (double x = 5.0; x <= 20.0; x += 0.25) worst = std::max(worst, std::abs(pt(x)) * std::exp(2.0 * x));
  CHECK(worst < 8.0 + 1e-9);
  CHECK(std::isfinite(decay_certificate(pt, 4)));
  CHECK(std::isfinite(decay_certificate(Potential::gaussian_well(1.0, 1.0, 3), 3)));
  // rho = 2: the weighted jets of -1/(1 + x^2) level off instead of growing.
  Potential slow = Potential::from_expression("-1/(1+x^2)", 1, 2.0, 20.0);
  const double near = decay_certificate(slow, 2, 8.0, 1.0, 40.0);
  const double far = decay_certificate(slow, 2, 8.0, 1.0, 400.0);
  CHECK(far < 1.2 * near);
}

TEST_CASE("values are real and finite on a sample") {
  for (const Potential& p : {Potential::poschl_teller(3), Potential::square_well(2.0, 1.0),
                             Potential::exponential_well(1.0, 1.0)}) {
    for (double x = -30.0; x <= 30.0; x += 0.7) {
      auto jet = eval_jet(p, Point{x, 0, 0}, p.smooth() ? 6 : 0);
      for (const auto& [k, value] : jet) CHECK(std::isfinite(value));
    }
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(eval_jet(Potential::poschl_teller(1), Point{0, 0, 0}, 40), Error);
  CHECK_THROWS_AS(Potential::from_expression("-exp(", 1, kInfiniteDecay, 5.0), Error);
  CHECK_THROWS_AS(Potential::from_expression("-exp(-y^2)", 1, kInfiniteDecay, 5.0), Error);
  CHECK_THROWS_AS(Potential::poschl_teller(0), Error);
  CHECK_THROWS_AS(Potential::gaussian_well(1.0, -1.0), Error);
  try {
    eval_jet(Potential::poschl_teller(1), Point{0, 0, 0}, 40);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capability);
  }
  // v alone is not integrable against a rho = 1 tail.
  Potential slow = Potential::from_expression("-1/sqrt(1+x^2)", 1, 1.0, 20.0);
  CHECK_THROWS_AS(integrate_density(slow, -JetPoly::v(1)), Error);
}
