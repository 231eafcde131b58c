#include "ssf/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ssf {

namespace {

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr num(double c) { return Expr::constant(c); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::mul, std::move(a), std::move(b)); }
ExprPtr add(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::add, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::sub, std::move(a), std::move(b)); }
ExprPtr div(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::div, std::move(a), std::move(b)); }
ExprPtr fn(Expr::Fn f, ExprPtr a) { return Expr::function(f, std::move(a)); }

// |x|^2 as a polynomial (smooth at the origin).
ExprPtr radius_squared(int dim) {
  ExprPtr s = mul(Expr::variable(0), Expr::variable(0));
  for (int i = 1; i < dim; ++i) s = add(s, mul(Expr::variable(i), Expr::variable(i)));
  return s;
}

double param(const PotentialSpec& s, const std::string& key, double fallback) {
  auto it = s.params.find(key);
  return it == s.params.end() ? fallback : it->second;
}

}  // namespace

Potential::Potential(PotentialSpec spec) : spec_(std::move(spec)) {
  const int d = spec_.dim;
  if (d < 1 || d > 3) fail(ErrorKind::usage, "potential dimension must be 1, 2 or 3");
  if (d == 3 && spec_.family != Family::expression) spec_.radial = true;
  switch (spec_.family) {
    case Family::zero:
      expr_ = num(0.0);
      support_radius_ = 1.0;
      spec_.rho = kInfiniteDecay;
      break;
    case Family::poschl_teller: {
      double n = param(spec_, "n", 1.0);
      if (n < 1.0 || n != std::floor(n)) fail(ErrorKind::usage, "poschl_teller order must be a positive integer");
      ExprPtr s = fn(Expr::Fn::sech, d == 1 ? Expr::variable(0) : Expr::radius());
      expr_ = mul(num(-n * (n + 1.0)), mul(s, s));
      support_radius_ = 10.0;
      spec_.rho = kInfiniteDecay;
      break;
    }
    case Family::gaussian_well: {
      double depth = param(spec_, "depth", 1.0);
      double width = param(spec_, "width", 1.0);
      if (width <= 0) fail(ErrorKind::usage, "gaussian_well width must be positive");
      expr_ = mul(num(-depth), fn(Expr::Fn::exp, div(Expr::negate(radius_squared(d)), num(width * width))));
      support_radius_ = 6.0 * width;
      spec_.rho = kInfiniteDecay;
      break;
    }
    case Family::square_well: {
      double depth = param(spec_, "depth", 1.0);
      double radius = param(spec_, "radius", 1.0);
      if (radius <= 0) fail(ErrorKind::usage, "square_well radius must be positive");
      expr_ = mul(num(-depth), fn(Expr::Fn::step, sub(num(radius), Expr::radius())));
      support_radius_ = radius;
      smooth_ = false;
      breakpoints_ = d == 1 ? std::vector<double>{-radius, radius} : std::vector<double>{radius};
      spec_.rho = kInfiniteDecay;
      break;
    }
    case Family::exponential_well: {
      double depth = param(spec_, "depth", 1.0);
      double rate = param(spec_, "rate", 1.0);
      if (rate <= 0) fail(ErrorKind::usage, "exponential_well rate must be positive");
      expr_ = mul(num(-depth), fn(Expr::Fn::exp, mul(num(-rate), Expr::radius())));
      support_radius_ = 18.0 / rate;
      smooth_ = false;
      breakpoints_ = d == 1 ? std::vector<double>{0.0} : std::vector<double>{};
      spec_.rho = kInfiniteDecay;
      break;
    }
    case Family::expression:
      expr_ = Expr::parse(spec_.expression, spec_.params);
      smooth_ = !expr_->has_kinks(d);
      support_radius_ = 10.0;
      {
        // Catches coordinates beyond the dimension before any numerics run.
        std::vector<double> probe(static_cast<std::size_t>(d), 0.5);
        (void)expr_->eval(std::span<const double>(probe));
      }
      break;
  }
  if (spec_.support_radius_hint > 0.0) support_radius_ = spec_.support_radius_hint;
  if (!(spec_.rho > 0.0)) fail(ErrorKind::usage, "decay exponent rho must be positive");
}

Potential Potential::zero(int dim) {
  PotentialSpec s;
  s.dim = dim;
  return Potential(s);
}

Potential Potential::poschl_teller(int n, int dim) {
  PotentialSpec s;
  s.dim = dim;
  s.family = Family::poschl_teller;
  s.params["n"] = n;
  return Potential(s);
}

Potential Potential::gaussian_well(double depth, double width, int dim) {
  PotentialSpec s;
  s.dim = dim;
  s.family = Family::gaussian_well;
  s.params = {{"depth", depth}, {"width", width}};
  return Potential(s);
}

Potential Potential::square_well(double depth, double radius, int dim) {
  PotentialSpec s;
  s.dim = dim;
  s.family = Family::square_well;
  s.params = {{"depth", depth}, {"radius", radius}};
  return Potential(s);
}

Potential Potential::exponential_well(double depth, double rate, int dim) {
  PotentialSpec s;
  s.dim = dim;
  s.family = Family::exponential_well;
  s.params = {{"depth", depth}, {"rate", rate}};
  return Potential(s);
}

Potential Potential::from_expression(const std::string& expr, int dim, double rho, double support_radius,
                                     const std::map<std::string, double>& params) {
  PotentialSpec s;
  s.dim = dim;
  s.family = Family::expression;
  s.expression = expr;
  s.rho = rho;
  s.support_radius_hint = support_radius;
  s.params = params;
  s.radial = dim == 3;
  return Potential(s);
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (spec_.family) {
    case Family::zero: os << "zero"; break;
    case Family::poschl_teller: os << "poschl_teller"; break;
    case Family::gaussian_well: os << "gaussian_well"; break;
    case Family::square_well: os << "square_well"; break;
    case Family::exponential_well: os << "exponential_well"; break;
    case Family::expression: os << "expression(" << spec_.expression << ")"; break;
  }
  for (const auto& [k, v] : spec_.params) os << " " << k << "=" << v;
  os << " d=" << spec_.dim;
  return os.str();
}

double Potential::operator()(const Point& x) const {
  double v = expr_->eval(std::span<const double>(x.data(), static_cast<std::size_t>(spec_.dim)));
  if (!std::isfinite(v)) fail(ErrorKind::domain, "potential is not finite at the query point");
  return v;
}

Taylor Potential::taylor(const Point& x, int order) const {
  if (order > max_jet_order()) fail(ErrorKind::capability, "jet order exceeds supported derivative order");
  const int d = spec_.dim;
  std::vector<Taylor> vars;
  vars.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) vars.push_back(Taylor::variable(d, order, i, x[static_cast<std::size_t>(i)]));
  Taylor t = expr_->eval(std::span<const Taylor>(vars));
  for (double c : t.coefficients())
    if (!std::isfinite(c)) fail(ErrorKind::domain, "non-finite derivative of the potential");
  return t;
}

std::map<MultiIndex, double> eval_jet(const Potential& p, const Point& x, int order) {
  Taylor t = p.taylor(x, order);
  std::map<MultiIndex, double> out;
  for (const auto& k : multi_indices(p.dim(), order)) out.emplace(k, t.derivative(k));
  return out;
}

double evaluate_density(const Potential& p, const JetPoly& density, const Point& x) {
  if (density.is_zero()) return 0.0;
  int order = std::max(density.max_jet_order(), 0);
  Taylor t = p.taylor(x, order);
  return density.evaluate([&](const MultiIndex& k) { return t.derivative(k); });
}

namespace {

struct Piece {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Piece gk(F&& f, double a, double b, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  Piece out;
  if (b <= a) return out;
  double err = 0.0;
  out.value = gauss_kronrod<double, 31>::integrate(f, a, b, 18, tol, &err);
  out.error = err;
  return out;
}

}  // namespace

DensityIntegral integrate_density(const Potential& p, const JetPoly& density, const IntegrationOptions& opts) {
  DensityIntegral out;
  if (density.is_zero()) {
    out.rule = "zero density";
    return out;
  }
  const int d = p.dim();
  if (d == 2) fail(ErrorKind::unsupported, "numeric integration is implemented for d = 1 and radial d = 3");
  if (!p.smooth() && density.max_jet_order() >= 1)
    fail(ErrorKind::capability, "density needs derivatives of a non-smooth potential");
  const int deg = density.min_degree();
  if (deg == 0 && !p.is_zero()) fail(ErrorKind::divergence, "density has a constant term");
  if (std::isfinite(p.rho()) && p.rho() * deg <= d)
    fail(ErrorKind::divergence, "density tail is not integrable for the stated decay exponent");
  if (p.is_zero()) {
    out.rule = "identically zero potential";
    return out;
  }

  const double R = p.support_radius();
  const double Rt = 4.0 * R;
  const double rel = 1e-13;
  std::vector<double> cuts;
  std::function<double(double)> f;
  double prefactor = 1.0;
  if (d == 1) {
    cuts = {-Rt, -R, R, Rt};
    for (double b : p.breakpoints())
      if (b > -R && b < R) cuts.push_back(b);
    f = [&](double x) { return evaluate_density(p, density, Point{x, 0.0, 0.0}); };
    out.rule = "Gauss-Kronrod(31) on [-4R,4R] split at R and breakpoints";
  } else {
    cuts = {0.0, R, Rt};
    for (double b : p.breakpoints())
      if (b > 0 && b < R) cuts.push_back(b);
    f = [&](double r) { return r * r * evaluate_density(p, density, Point{r, 0.0, 0.0}); };
    prefactor = 4.0 * std::numbers::pi;
    out.rule = "4 pi r^2 radial Gauss-Kronrod(31) on [0,4R] split at R and breakpoints";
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece piece = gk(f, cuts[i], cuts[i + 1], rel);
    out.value += piece.value;
    out.abs_error_estimate += std::abs(piece.error);
  }
  // Tail beyond 4R: polynomial tails from rho, otherwise the edge value
  // times the edge radius bounds an exponentially small remainder.
  double edge = std::abs(f(Rt));
  if (d == 1) edge += std::abs(f(-Rt));
  double tail = std::isfinite(p.rho()) ? edge * Rt / (p.rho() * deg - d) : edge * Rt;
  out.value *= prefactor;
  out.abs_error_estimate = prefactor * (out.abs_error_estimate + tail) +
                           std::numeric_limits<double>::epsilon() * std::abs(prefactor * out.value);
  if (!std::isfinite(out.value)) fail(ErrorKind::accuracy, "density integral is not finite");
  if (out.abs_error_estimate > std::max(opts.abs_tolerance, 1e-6 * std::abs(out.value)) * 1e4)
    throw AccuracyError("density quadrature did not converge", out.value, out.abs_error_estimate);
  return out;
}

double decay_certificate(const Potential& p, int max_order, double rho_cap, double r_min, double r_max) {
  const double rho = std::min(p.rho(), rho_cap);
  double worst = 0.0;
  const int n = 40;
  for (int i = 0; i <= n; ++i) {
    double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / n);
    Taylor t = p.taylor(Point{r, 0.0, 0.0}, max_order);
    for (const auto& k : multi_indices(p.dim(), max_order)) {
      double w = std::abs(t.derivative(k)) * std::pow(1.0 + r, rho + k.order());
      worst = std::max(worst, w);
    }
  }
  return worst;
}

double integral_of_v(const Potential& p) {
  if (p.is_zero()) return 0.0;
  JetPoly v = JetPoly::v(p.dim());
  return integrate_density(p, v).value;
}

}  // namespace ssf
