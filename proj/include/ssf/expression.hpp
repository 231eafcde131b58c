#pragma once

// Small expression trees for potentials, evaluated either as doubles or as
// Taylor jets (automatic differentiation).

#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ssf/errors.hpp"
#include "ssf/taylor.hpp"

namespace ssf {

class Expr {
 public:
  enum class Op { constant, variable, radius, add, sub, mul, div, neg, pow, func };
  enum class Fn { exp, log, sin, cos, sinh, cosh, tanh, sech, sqrt, abs, step };

  static std::shared_ptr<const Expr> constant(double c);
  /// Coordinate x_i.
  static std::shared_ptr<const Expr> variable(int i);
  /// |x| in the ambient dimension.
  static std::shared_ptr<const Expr> radius();
  static std::shared_ptr<const Expr> binary(Op op, std::shared_ptr<const Expr> a,
                                            std::shared_ptr<const Expr> b);
  static std::shared_ptr<const Expr> negate(std::shared_ptr<const Expr> a);
  static std::shared_ptr<const Expr> function(Fn fn, std::shared_ptr<const Expr> a);

  /// Parse an arithmetic expression in x, y, z (or x1, x2, x3), r, pi and
  /// named parameters.
  static std::shared_ptr<const Expr> parse(const std::string& text,
                                           const std::map<std::string, double>& params = {});

  /// True if the tree contains a non-smooth primitive (abs, step, or |x| in 1D).
  bool has_kinks(int dim) const;

  template <class T>
  T eval(std::span<const T> x) const;

 private:
  Op op_ = Op::constant;
  Fn fn_ = Fn::exp;
  double value_ = 0.0;
  int index_ = 0;
  std::shared_ptr<const Expr> a_, b_;
};

namespace detail {
inline double apply_fn(Expr::Fn fn, double x) {
  switch (fn) {
    case Expr::Fn::exp: return std::exp(x);
    case Expr::Fn::log: return std::log(x);
    case Expr::Fn::sin: return std::sin(x);
    case Expr::Fn::cos: return std::cos(x);
    case Expr::Fn::sinh: return std::sinh(x);
    case Expr::Fn::cosh: return std::cosh(x);
    case Expr::Fn::tanh: return std::tanh(x);
    case Expr::Fn::sech: return 1.0 / std::cosh(x);
    case Expr::Fn::sqrt: return std::sqrt(x);
    case Expr::Fn::abs: return std::abs(x);
    case Expr::Fn::step: return x > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

inline Taylor apply_fn(Expr::Fn fn, const Taylor& x) {
  switch (fn) {
    case Expr::Fn::exp: return exp(x);
    case Expr::Fn::log: return log(x);
    case Expr::Fn::sin: return sin(x);
    case Expr::Fn::cos: return cos(x);
    case Expr::Fn::sinh: return sinh(x);
    case Expr::Fn::cosh: return cosh(x);
    case Expr::Fn::tanh: return tanh(x);
    case Expr::Fn::sech: return sech(x);
    case Expr::Fn::sqrt: return sqrt(x);
    case Expr::Fn::abs: return abs(x);
    case Expr::Fn::step: return heaviside(x);
  }
  return x;
}

inline double power(double a, double b) { return std::pow(a, b); }
inline Taylor power(const Taylor& a, double b) { return pow(a, b); }
inline double make_constant(const double&, double c) { return c; }
inline Taylor make_constant(const Taylor& like, double c) { return Taylor(like.dim(), like.order(), c); }
inline double radius_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}
inline Taylor radius_of(std::span<const Taylor> x) {
  if (x.size() == 1) return abs(x[0]);
  Taylor s = x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  if (s.value() == 0.0 && s.order() > 0) fail(ErrorKind::domain, "|x| is not smooth at the origin");
  return sqrt(s);
}
}  // namespace detail

template <class T>
T Expr::eval(std::span<const T> x) const {
  switch (op_) {
    case Op::constant: return detail::make_constant(x[0], value_);
    case Op::variable:
      if (static_cast<std::size_t>(index_) >= x.size())
        fail(ErrorKind::domain, "expression uses a coordinate beyond the dimension");
      return x[static_cast<std::size_t>(index_)];
    case Op::radius: return detail::radius_of(x);
    case Op::add: return a_->eval(x) + b_->eval(x);
    case Op::sub: return a_->eval(x) - b_->eval(x);
    case Op::mul: return a_->eval(x) * b_->eval(x);
    case Op::div: return a_->eval(x) / b_->eval(x);
    case Op::neg: return -a_->eval(x);
    case Op::pow: return detail::power(a_->eval(x), b_->value_);
    case Op::func: return detail::apply_fn(fn_, a_->eval(x));
  }
  return x[0];
}

}  // namespace ssf
