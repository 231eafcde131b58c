#pragma once

// Potentials v on R^d: named families or user expressions, their jets, and
// quadrature of jet-polynomial densities along a concrete potential.

#include <array>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ssf/expression.hpp"
#include "ssf/jet_algebra.hpp"

namespace ssf {

enum class Family { zero, poschl_teller, gaussian_well, square_well, exponential_well, expression };

/// Decay exponent sentinel for super-polynomially decaying potentials.
inline constexpr double kInfiniteDecay = std::numeric_limits<double>::infinity();

struct PotentialSpec {
  int dim = 1;
  Family family = Family::zero;
  std::map<std::string, double> params;
  std::string expression;  // used when family == expression
  double rho = kInfiniteDecay;
  bool radial = false;
  double support_radius_hint = 0.0;  // 0: family default
};

using Point = std::array<double, kMaxDim>;

class Potential {
 public:
  explicit Potential(PotentialSpec spec);

  // Named families. depth > 0 means an attractive well.
  static Potential zero(int dim = 1);
  /// v = -n(n+1) sech^2(|x|).
  static Potential poschl_teller(int n, int dim = 1);
  /// v = -depth exp(-|x|^2 / width^2).
  static Potential gaussian_well(double depth, double width, int dim = 1);
  /// v = -depth for |x| < radius.
  static Potential square_well(double depth, double radius, int dim = 1);
  /// v = -depth exp(-rate |x|).
  static Potential exponential_well(double depth, double rate, int dim = 1);
  static Potential from_expression(const std::string& expr, int dim, double rho,
                                   double support_radius, const std::map<std::string, double>& params = {});

  const PotentialSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double rho() const { return spec_.rho; }
  bool is_zero() const { return spec_.family == Family::zero; }
  /// C-infinity everywhere (no kinks or jumps).
  bool smooth() const { return smooth_; }
  /// Length scale beyond which v is in its asymptotic tail.
  double support_radius() const { return support_radius_; }
  /// Points (1D) or radii (radial) where v or its derivatives jump.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  std::string describe() const;

  double operator()(const Point& x) const;
  double operator()(double x) const { return (*this)(Point{x, 0.0, 0.0}); }
  /// Radial profile v(r) for d = 3 radial potentials.
  double radial_value(double r) const { return (*this)(Point{r, 0.0, 0.0}); }

  /// Highest derivative order eval_jet supports.
  int max_jet_order() const { return 16; }

  /// Taylor jet of v at x to total order `order`.
  Taylor taylor(const Point& x, int order) const;

 private:
  PotentialSpec spec_;
  std::shared_ptr<const Expr> expr_;
  bool smooth_ = true;
  double support_radius_ = 1.0;
  std::vector<double> breakpoints_;
};

/// Moves x strictly inside (lo, hi) so that ODE stages landing on a segment
/// end use the one-sided value of a potential that jumps there.
inline double inside_segment(double x, double lo, double hi) {
  const double eps = 1e-12 * (hi - lo);
  return x < lo + eps ? lo + eps : (x > hi - eps ? hi - eps : x);
}

/// d^k v(x) for all |k| <= order.
std::map<MultiIndex, double> eval_jet(const Potential& p, const Point& x, int order);

struct DensityIntegral {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::string rule;
};

struct IntegrationOptions {
  double abs_tolerance = 1e-12;
};

/// Integral over R^d of a jet-polynomial density with v's jets substituted.
/// For d = 3 the density is evaluated along a ray (it must be rotation
/// invariant, which holds for heat and resolvent invariants).
DensityIntegral integrate_density(const Potential& p, const JetPoly& density,
                                  const IntegrationOptions& opts = {});

/// Value of a jet-polynomial density at a point.
double evaluate_density(const Potential& p, const JetPoly& density, const Point& x);

/// Largest value of |d^k v(x)| (1 + |x|)^(rho' + |k|) over a log-spaced grid
/// of points on the first axis, rho' = min(rho, cap). Bounded for admissible
/// potentials.
double decay_certificate(const Potential& p, int max_order, double rho_cap = 8.0,
                         double r_min = 1.0, double r_max = 40.0);

/// Integral of v over R^d (radially: 4 pi int v r^2 dr).
double integral_of_v(const Potential& p);

}  // namespace ssf
