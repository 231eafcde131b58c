#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "ssf/errors.hpp"
#include "ssf/jet_algebra.hpp"

using namespace ssf;

namespace {

Coefficient q(long a, long b = 1) { return Coefficient(mpq_class(a, b)); }

// Random polynomial in the first few jets with small integer coefficients.
JetPoly random_poly(std::mt19937& rng, int dim) {
  std::uniform_int_distribution<int> coef(-3, 3), pick(0, 3);
  std::vector<JetPoly> atoms{JetPoly(dim, q(1)), JetPoly::v(dim), JetPoly::v(dim).derivative(0),
                             JetPoly::v(dim).laplacian()};
  JetPoly p(dim);
  for (int t = 0; t < 3; ++t) {
    JetPoly m = atoms[static_cast<std::size_t>(pick(rng))] * atoms[static_cast<std::size_t>(pick(rng))];
    p += m * q(coef(rng));
  }
  return p;
}

DiffOp random_op(std::mt19937& rng, int dim) {
  DiffOp op(dim);
  std::uniform_int_distribution<int> pick(0, dim - 1);
  op.add(MultiIndex{}, random_poly(rng, dim));
  op.add(MultiIndex::unit(pick(rng)), random_poly(rng, dim));
  MultiIndex two = MultiIndex::unit(pick(rng)) + MultiIndex::unit(pick(rng));
  op.add(two, random_poly(rng, dim));
  return op;
}

}  // namespace

TEST_CASE("gamma at half-integers stays in the ring Q * pi^(1/2)") {
  for (long twice = 1; twice <= 15; ++twice) {
    auto g = gamma_half(twice);
    REQUIRE(g.has_value());
    CHECK(g->to_double() == doctest::Approx(std::tgamma(twice / 2.0)).epsilon(1e-14));
    CHECK(g->pi_half == (twice % 2 == 1 ? 1 : 0));
  }
  for (long twice : {-1L, -3L, -5L}) {
    auto g = gamma_half(twice);
    REQUIRE(g.has_value());
    CHECK(g->to_double() == doctest::Approx(boost::math::tgamma(twice / 2.0)).epsilon(1e-14));
  }
  for (long twice : {0L, -2L, -4L}) {
    CHECK_FALSE(gamma_half(twice).has_value());
    CHECK(reciprocal_gamma_half(twice).is_zero());
  }
  CHECK(*gamma_half(1) == Coefficient(mpq_class(1), 1));
  CHECK(*gamma_half(5) == Coefficient(mpq_class(3, 4), 1));
  CHECK(*gamma_half(-1) == Coefficient(mpq_class(-2), 1));
}

TEST_CASE("coefficient text form and numeric value") {
  CHECK(q(1, 2).to_string() == "(1/2)");
  CHECK(Coefficient(mpq_class(3), 1).to_string() == "(3)*pi^(1/2)");
  CHECK(Coefficient(mpq_class(3), 1).to_double() == doctest::Approx(3.0 * std::sqrt(M_PI)));
  CHECK(Coefficient(mpq_class(0), 3).pi_half == 0);
}

TEST_CASE("canonical form merges like terms and drops zeros") {
  JetPoly v = JetPoly::v(1);
  JetPoly p = v * v + v * q(2) - v * v;
  CHECK(p == v * q(2));
  CHECK((v - v).is_zero());
  CHECK((v - v).to_string() == "0");
  CHECK((v * v * q(1, 2) - v.laplacian() * q(1, 6)).to_string() == "(-1/6)*u[2] + (1/2)*u[0]^2");
  JetPoly three = JetPoly::v(3);
  CHECK(three.laplacian().to_string() == "(1)*u[2,0,0] + (1)*u[0,2,0] + (1)*u[0,0,2]");
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937 rng(7);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int trial = 0; trial < 20; ++trial) {
      JetPoly a = random_poly(rng, dim), b = random_poly(rng, dim), c = random_poly(rng, dim);
      CHECK((a + b) + c == a + (b + c));
      CHECK(a * b == b * a);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a - a == JetPoly(dim));
    }
  }
}

TEST_CASE("jet derivative obeys the Leibniz rule and commutes") {
  std::mt19937 rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int trial = 0; trial < 10; ++trial) {
      JetPoly a = random_poly(rng, dim), b = random_poly(rng, dim);
      for (int i = 0; i < dim; ++i) {
        CHECK((a * b).derivative(i) == a.derivative(i) * b + a * b.derivative(i));
        for (int j = 0; j < dim; ++j) CHECK(a.derivative(i).derivative(j) == a.derivative(j).derivative(i));
      }
      CHECK(a.laplacian().derivative(0) == a.derivative(0).laplacian());
    }
  }
}

TEST_CASE("jet polynomial evaluation") {
  // v = sin(x): u[k] = sin^(k)(0.3)
  auto jet = [](const MultiIndex& k) {
    const double x = 0.3;
    switch (k[0] % 4) {
      case 0: return std::sin(x);
      case 1: return std::cos(x);
      case 2: return -std::sin(x);
      default: return -std::cos(x);
    }
  };
  JetPoly v = JetPoly::v(1);
  JetPoly p = v * v * q(1, 2) - v.laplacian() * q(1, 6);
  CHECK(p.evaluate(jet) == doctest::Approx(0.5 * std::sin(0.3) * std::sin(0.3) + std::sin(0.3) / 6.0));
}

TEST_CASE("operator composition follows the Leibniz rule") {
  for (int dim = 1; dim <= 3; ++dim) {
    JetPoly v = JetPoly::v(dim);
    DiffOp d1 = DiffOp::partial(dim, MultiIndex::unit(0));
    DiffOp lhs = compose(d1, DiffOp::multiply(v));
    DiffOp rhs = DiffOp::multiply(v.derivative(0));
    rhs.add(MultiIndex::unit(0), v);
    CHECK(lhs == rhs);
    CHECK(compose(DiffOp::schrodinger(dim), DiffOp::identity(dim)) == DiffOp::schrodinger(dim));
    CHECK(compose(DiffOp::identity(dim), DiffOp::schrodinger(dim)) == DiffOp::schrodinger(dim));
    DiffOp x1 = DiffOp::multiply(-v);
    CHECK(compose(x1, x1) == DiffOp::multiply(v * v));
  }
}

TEST_CASE("operator composition is associative") {
  std::mt19937 rng(3);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int trial = 0; trial < 6; ++trial) {
      DiffOp a = random_op(rng, dim), b = random_op(rng, dim), c = random_op(rng, dim);
      CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    }
  }
}

TEST_CASE("schrodinger_apply on simple displacement polynomials") {
  for (int dim = 1; dim <= 3; ++dim) {
    DisplacementPoly one = DisplacementPoly::constant(JetPoly(dim, q(1)));
    DisplacementPoly applied = schrodinger_apply(one, 4);
    CHECK(applied.diagonal() == JetPoly::v(dim));
    CHECK(applied == DisplacementPoly::potential_taylor(dim, 4));

    DisplacementPoly r2 = DisplacementPoly::radius_power(dim, 1);
    DisplacementPoly h = schrodinger_apply(r2, 4);
    CHECK(h.diagonal() == JetPoly(dim, q(-2 * dim)));
    // Without the potential part the result is -Laplacian_y.
    DisplacementPoly expected = DisplacementPoly::potential_taylor(dim, 2).multiply(r2, 4);
    expected -= r2.laplacian_y();
    CHECK(h == expected);
  }
}

TEST_CASE("(-Laplacian + v)^2 |y|^2 at y = 0 in d = 1 by hand") {
  // (-d^2 + v)(-2 + v(x) y^2 + ...) = -(2 u0 + 4 u1 y + ...) ... at y = 0: -2 u0 - 2 u0 = -4 u0.
  DisplacementPoly r2 = DisplacementPoly::radius_power(1, 1);
  DisplacementPoly once = schrodinger_apply(r2);
  DisplacementPoly twice = schrodinger_apply(once, 0);
  CHECK(twice.diagonal() == JetPoly::v(1) * q(-4));
}

TEST_CASE("schrodinger_apply is permutation equivariant") {
  for (int dim = 2; dim <= 3; ++dim) {
    DisplacementPoly f = DisplacementPoly::monomial(dim, MultiIndex(2, 1, 0), q(1));
    f += DisplacementPoly::monomial(dim, MultiIndex(0, 0, 0), q(3));
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        CHECK(schrodinger_apply(f.permuted(i, j), 4) == schrodinger_apply(f, 4).permuted(i, j));
  }
}

TEST_CASE("sigma_integrate scales y^beta by 1/(n + |beta| + 1)") {
  DisplacementPoly one = DisplacementPoly::constant(JetPoly(1, q(1)));
  CHECK(sigma_integrate(one, 0) == one);
  DisplacementPoly y2 = DisplacementPoly::monomial(2, MultiIndex(2, 0), q(1));
  CHECK(sigma_integrate(y2, 1) == DisplacementPoly::monomial(2, MultiIndex(2, 0), q(1, 4)));
  DisplacementPoly t = DisplacementPoly::potential_taylor(1, 2);
  DisplacementPoly expected(1);
  for (const auto& [beta, c] : t.coefficients()) expected.add(beta, c * q(1, beta.order() + 1));
  CHECK(sigma_integrate(t, 0) == expected);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(factorial(-1), Error);
}
