#pragma once

// Truncated multivariate Taylor arithmetic (forward-mode jets).
//
// A Taylor value holds c_m for all monomials y^m with |m| <= order in
// `dim` variables, representing f(x0 + y). Derivatives follow from
// d^m f(x0) = m! c_m.

#include <memory>
#include <vector>

#include "ssf/jet_algebra.hpp"

namespace ssf {

class Taylor {
 public:
  struct Layout;

  Taylor() = default;
  Taylor(int dim, int order, double value = 0.0);

  /// The coordinate function x_i expanded about x0_i.
  static Taylor variable(int dim, int order, int i, double x0);

  int dim() const;
  int order() const;
  double value() const { return c_[0]; }
  const std::vector<double>& coefficients() const { return c_; }

  /// Taylor coefficient of y^m (zero if |m| > order).
  double coefficient(const MultiIndex& m) const;
  /// d^m f(x0).
  double derivative(const MultiIndex& m) const;

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(double s);
  Taylor& operator+=(double s) { c_[0] += s; return *this; }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(const Taylor& a, const Taylor& b);
  friend Taylor operator/(const Taylor& a, const Taylor& b);
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator+(double s, Taylor a) { return a += s; }
  friend Taylor operator-(Taylor a, double s) { a.c_[0] -= s; return a; }
  friend Taylor operator-(double s, const Taylor& a);
  Taylor operator-() const;

  /// Compose with a univariate series F(t) = sum F_j t^j about value():
  /// returns sum F_j (this - value())^j.
  Taylor compose(const std::vector<double>& univariate) const;

 private:
  std::shared_ptr<const Layout> layout_;
  std::vector<double> c_;
};

// Elementary functions on jets. Univariate inputs use the standard
// recurrences directly; multivariate inputs are composed.
Taylor exp(const Taylor& x);
Taylor log(const Taylor& x);
Taylor sin(const Taylor& x);
Taylor cos(const Taylor& x);
Taylor sinh(const Taylor& x);
Taylor cosh(const Taylor& x);
Taylor tanh(const Taylor& x);
Taylor sech(const Taylor& x);
Taylor sqrt(const Taylor& x);
Taylor pow(const Taylor& x, double p);
Taylor pow(const Taylor& x, int n);
/// |x| away from x = 0 (domain error at a kink when order > 0).
Taylor abs(const Taylor& x);
/// Heaviside step away from its jump.
Taylor heaviside(const Taylor& x);

}  // namespace ssf
