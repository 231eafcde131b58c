#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "ssf/errors.hpp"
#include "ssf/potential.hpp"
#include "ssf/scattering_radial3d.hpp"

using namespace ssf;

namespace {

constexpr double kPi = std::numbers::pi;

// s-wave phase for v = -depth on r < radius, modulo pi.
double square_well_s_phase(double depth, double radius, double k) {
  const double inner = std::sqrt(k * k + depth);
  return -k * radius + std::atan(k / inner * std::tan(inner * radius));
}

}  // namespace

TEST_CASE("Riccati-Bessel functions against the spherical Bessel functions") {
  std::vector<double> jhat, nhat;
  for (double x : {0.05, 0.9, 4.0, 23.0}) {
    riccati_bessel(x, 12, jhat, nhat);
    REQUIRE(jhat.size() == 13);
    for (unsigned l = 0; l <= 12; ++l) {
      CAPTURE(x);
      CAPTURE(l);
      CHECK(jhat[l] == doctest::Approx(x * boost::math::sph_bessel(l, x)).epsilon(1e-11));
      if (x > 0.5) CHECK(nhat[l] == doctest::Approx(x * boost::math::sph_neumann(l, x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("zero potential has no phase") {
  Potential z = Potential::zero(3);
  for (int l = 0; l <= 3; ++l) CHECK(phase_shift(z, l, 1.3) == 0.0);
  CHECK(ssf_3d_value(z, 2.0) == 0.0);
  CHECK(regularized_ssf_3d(z, 2.0) == 0.0);
  CHECK(eigenvalues_3d(z).empty());
}

TEST_CASE("square-well s-wave phase against the matching formula") {
  Potential sq = Potential::square_well(3.0, 1.0, 3);
  for (double k : {0.2, 1.0, 2.5, 6.0}) {
    CAPTURE(k);
    const double diff = phase_shift(sq, 0, k) - square_well_s_phase(3.0, 1.0, k);
    CHECK(std::abs(std::remainder(diff, kPi)) < 1e-8);
  }
}

TEST_CASE("high partial waves follow the Born approximation") {
  Potential g = Potential::gaussian_well(1.0, 1.0, 3);
  const double k = 8.0;
  for (int l : {0, 2, 6}) {
    const double exact = phase_shift(g, l, k);
    const double born = born_phase_shift(g, l, k);
    CHECK(std::abs(exact - born) < 0.05 * std::abs(born) + 1e-9);
  }
  // Weak potential: Born is accurate at every l.
  Potential weak = Potential::gaussian_well(0.01, 1.0, 3);
  CHECK(phase_shift(weak, 1, 2.0) == doctest::Approx(born_phase_shift(weak, 1, 2.0)).epsilon(2e-2));
}

TEST_CASE("spectral shift: leading growth, steps and the regularized part") {
  Potential g = Potential::gaussian_well(2.0, 1.0, 3);
  const double lead = integral_of_v(g) / (4.0 * kPi * kPi);
  for (double l : {100.0, 400.0}) CHECK(ssf_3d_value(g, l) / std::sqrt(l) == doctest::Approx(lead).epsilon(5.0 / l));
  CHECK(std::abs(regularized_ssf_3d(g, 400.0)) < std::abs(regularized_ssf_3d(g, 100.0)));

  Potential deep = Potential::square_well(30.0, 1.5, 3);
  std::vector<double> e = eigenvalues_3d(deep);
  REQUIRE(e.size() >= 3);
  for (std::size_t j = 0; j + 1 < e.size(); ++j) {
    if (e[j + 1] - e[j] < 1e-9) continue;
    CHECK(ssf_3d_value(deep, 0.5 * (e[j] + e[j + 1])) == -static_cast<double>(j + 1));
  }
}

TEST_CASE("sign property in three dimensions") {
  Potential bump = Potential::gaussian_well(-2.0, 1.0, 3);
  Potential well = Potential::gaussian_well(2.0, 1.0, 3);
  for (double l : {0.05, 0.5, 3.0, 30.0}) {
    CHECK(ssf_3d_value(bump, l) >= -1e-6);
    CHECK(ssf_3d_value(well, l) <= 1e-6);
  }
}

TEST_CASE("bound states of a square well") {
  // s-wave ground state solves -q cot(q R) = kappa; p-wave threshold is depth = pi^2.
  Potential sq = Potential::square_well(6.0, 1.0, 3);
  auto states = bound_states_3d(sq);
  REQUIRE(states.size() == 1);
  CHECK(states[0].ell == 0);
  CHECK(states[0].multiplicity == 1);
  const double kappa = std::sqrt(-states[0].energy);
  const double inner = std::sqrt(6.0 - kappa * kappa);
  CHECK(-inner / std::tan(inner) == doctest::Approx(kappa).epsilon(1e-7));
  auto deeper = eigenvalues_3d(Potential::square_well(12.0, 1.0, 3));
  CHECK(deeper.size() == 4);  // one s state and a threefold p state
}

TEST_CASE("scattering length of a square well") {
  const double depth = 1.5, radius = 1.0;
  const double inner = std::sqrt(depth);
  CHECK(scattering_length(Potential::square_well(depth, radius, 3)) ==
        doctest::Approx(radius - std::tan(inner * radius) / inner).epsilon(1e-7));
}

TEST_CASE("Birman-Krein in three dimensions") {
  Potential g = Potential::gaussian_well(3.0, 1.0, 3);
  for (double k : {0.5, 1.5, 4.0}) {
    const std::complex<double> lhs = smatrix_det_3d(g, k);
    const double xi = ssf_3d_value(g, k * k);
    CHECK(std::abs(lhs - std::exp(std::complex<double>(0.0, -2.0 * kPi * xi))) < 1e-3);
  }
}

TEST_CASE("Levinson at zero energy") {
  LevinsonReport shallow = levinson_check_3d(Potential::gaussian_well(1.0, 1.0, 3));
  CHECK(shallow.bound_states == 0);
  CHECK(shallow.pass);
  CHECK(shallow.xi_at_zero == doctest::Approx(0.0).epsilon(1e-2));

  LevinsonReport bound = levinson_check_3d(Potential::gaussian_well(4.0, 1.0, 3));
  CHECK(bound.bound_states == 1);
  CHECK(bound.pass);
  CHECK(bound.xi_at_zero == doctest::Approx(-1.0).epsilon(1e-2));

  // Zero-energy resonance at depth (pi/2)^2 for the unit square well.
  LevinsonReport tuned = levinson_check_3d(Potential::square_well(kPi * kPi / 4.0, 1.0, 3));
  CHECK(tuned.resonant);
  CHECK_FALSE(tuned.applicable);
  CHECK_FALSE(tuned.pass);
}

TEST_CASE("radial numerics reject one-dimensional potentials") {
  CHECK_THROWS_AS(phase_shift(Potential::poschl_teller(1), 0, 1.0), Error);
  CHECK_THROWS_AS(ssf_3d(Potential::gaussian_well(1.0, 1.0, 3), {}), Error);
}
