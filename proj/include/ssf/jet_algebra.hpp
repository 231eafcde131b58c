#pragma once

// Exact polynomial algebra over jets u_k = d^k v of a potential v on R^d.
//
// Coefficients live in Q * pi^(h/2). A JetPoly keys each term by the pi
// half-power together with its jet monomial, so sums of terms carrying
// different powers of pi stay exact.

#include <gmpxx.h>

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ssf {

inline constexpr int kMaxDim = 3;

/// Multi-index kappa in N^d (unused trailing slots are zero).
struct MultiIndex {
  std::array<int, kMaxDim> e{0, 0, 0};

  MultiIndex() = default;
  MultiIndex(int a0, int a1 = 0, int a2 = 0) : e{a0, a1, a2} {}

  int order() const { return e[0] + e[1] + e[2]; }
  int operator[](int i) const { return e[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return e[static_cast<std::size_t>(i)]; }

  MultiIndex operator+(const MultiIndex& o) const {
    return {e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2]};
  }
  MultiIndex operator-(const MultiIndex& o) const {
    return {e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2]};
  }
  bool operator==(const MultiIndex&) const = default;

  /// Canonical order: total order first, then larger leading components first
  /// (so u[2,0,0] < u[0,2,0] < u[0,0,2]).
  std::strong_ordering operator<=>(const MultiIndex& o) const {
    if (auto c = order() <=> o.order(); c != 0) return c;
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      if (e[i] != o.e[i]) return o.e[i] <=> e[i];
    }
    return std::strong_ordering::equal;
  }

  static MultiIndex unit(int i) {
    MultiIndex m;
    m[i] = 1;
    return m;
  }

  std::string to_string(int dim) const;
};

/// All multi-indices of dimension `dim` with |k| <= max_order, canonical order.
std::vector<MultiIndex> multi_indices(int dim, int max_order);
/// All multi-indices of dimension `dim` with |k| == order.
std::vector<MultiIndex> multi_indices_exact(int dim, int order);

/// Exact scalar q * pi^(pi_half / 2).
struct Coefficient {
  mpq_class q{0};
  int pi_half = 0;

  Coefficient() = default;
  Coefficient(mpq_class value, int half = 0) : q(std::move(value)), pi_half(half) {
    q.canonicalize();
    if (q == 0) pi_half = 0;
  }
  Coefficient(long value) : Coefficient(mpq_class(value)) {}

  bool is_zero() const { return q == 0; }
  double to_double() const;
  std::string to_string() const;

  Coefficient operator*(const Coefficient& o) const { return {q * o.q, pi_half + o.pi_half}; }
  Coefficient operator/(const Coefficient& o) const;
  Coefficient operator-() const { return {-q, pi_half}; }
  bool operator==(const Coefficient& o) const { return q == o.q && pi_half == o.pi_half; }
};

mpz_class factorial(long n);
mpz_class binomial(long n, long k);

/// Gamma(twice / 2) in the coefficient ring; nullopt at the poles (non-positive integers).
std::optional<Coefficient> gamma_half(long twice);
/// 1 / Gamma(twice / 2); exact zero at the poles.
Coefficient reciprocal_gamma_half(long twice);
/// Integer power of pi as a coefficient.
inline Coefficient pi_power(int power) { return {mpq_class(1), 2 * power}; }

/// One jet monomial: prod u_k^p with sorted distinct k, together with pi^(h/2).
struct JetMonomial {
  int pi_half = 0;
  std::vector<std::pair<MultiIndex, int>> factors;

  int degree() const;
  int max_jet_order() const;
  bool operator==(const JetMonomial&) const = default;
  std::strong_ordering operator<=>(const JetMonomial& o) const;
};

/// Polynomial over Q * pi^(1/2) in jet variables, kept canonical.
class JetPoly {
 public:
  using TermMap = std::map<JetMonomial, mpq_class>;

  explicit JetPoly(int dim = 1);
  JetPoly(int dim, const Coefficient& c);

  /// The jet variable u_k.
  static JetPoly jet(int dim, const MultiIndex& k);
  /// The potential itself, u_0.
  static JetPoly v(int dim) { return jet(dim, MultiIndex{}); }

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Smallest number of jet factors over all terms (0 for a constant term).
  int min_degree() const;
  int max_jet_order() const;

  JetPoly& operator+=(const JetPoly& o);
  JetPoly& operator-=(const JetPoly& o);
  JetPoly& operator*=(const Coefficient& c);
  friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
  friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
  friend JetPoly operator*(JetPoly a, const Coefficient& c) { return a *= c; }
  friend JetPoly operator*(const Coefficient& c, JetPoly a) { return a *= c; }
  friend JetPoly operator*(const JetPoly& a, const JetPoly& b);
  JetPoly operator-() const;
  bool operator==(const JetPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  /// d/dx_i by the chain rule d_i u_k = u_{k + e_i}.
  JetPoly derivative(int i) const;
  JetPoly derivative(const MultiIndex& k) const;
  JetPoly laplacian() const;

  /// Numeric value given jet values and pi.
  double evaluate(const std::function<double(const MultiIndex&)>& jet_value) const;

  /// Canonical text form, e.g. "(1/2)*u[0]^2 + (-1/6)*u[2]".
  std::string to_string() const;

  void add_term(const JetMonomial& m, const mpq_class& c);

 private:
  int dim_;
  TermMap terms_;
};

JetPoly pow(const JetPoly& p, int n);

/// Differential operator sum_alpha p_alpha(x) d^alpha.
class DiffOp {
 public:
  using CoeffMap = std::map<MultiIndex, JetPoly>;

  explicit DiffOp(int dim = 1) : dim_(dim) {}

  static DiffOp identity(int dim);
  static DiffOp multiply(const JetPoly& f);
  /// d^alpha.
  static DiffOp partial(int dim, const MultiIndex& alpha);
  /// -Laplacian.
  static DiffOp free_hamiltonian(int dim);
  /// -Laplacian + v.
  static DiffOp schrodinger(int dim);

  int dim() const { return dim_; }
  const CoeffMap& coefficients() const { return coeffs_; }
  /// p_alpha, zero polynomial if absent.
  JetPoly coefficient(const MultiIndex& alpha) const;
  /// Maximal |alpha| with a nonzero coefficient, -1 for the zero operator.
  int order() const;

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  bool operator==(const DiffOp& o) const { return dim_ == o.dim_ && coeffs_ == o.coeffs_; }

  void add(const MultiIndex& alpha, const JetPoly& p);
  std::string to_string() const;

 private:
  int dim_;
  CoeffMap coeffs_;
};

/// a o b expanded by the Leibniz rule.
DiffOp compose(const DiffOp& a, const DiffOp& b);

/// Polynomial in the displacement y = x - x' with JetPoly coefficients
/// (jets evaluated at the base point x').
class DisplacementPoly {
 public:
  using CoeffMap = std::map<MultiIndex, JetPoly>;

  explicit DisplacementPoly(int dim = 1) : dim_(dim) {}

  static DisplacementPoly constant(const JetPoly& c);
  static DisplacementPoly monomial(int dim, const MultiIndex& beta, const Coefficient& c);
  /// |y|^(2k).
  static DisplacementPoly radius_power(int dim, int k);
  /// Taylor expansion of v about the base point: sum u_k y^k / k!, |k| <= max_degree.
  static DisplacementPoly potential_taylor(int dim, int max_degree);

  int dim() const { return dim_; }
  const CoeffMap& coefficients() const { return coeffs_; }
  int degree() const;
  JetPoly diagonal() const;
  bool is_zero() const { return coeffs_.empty(); }

  DisplacementPoly& operator+=(const DisplacementPoly& o);
  DisplacementPoly& operator-=(const DisplacementPoly& o);
  DisplacementPoly& operator*=(const Coefficient& c);
  friend DisplacementPoly operator+(DisplacementPoly a, const DisplacementPoly& b) { return a += b; }
  friend DisplacementPoly operator-(DisplacementPoly a, const DisplacementPoly& b) { return a -= b; }
  bool operator==(const DisplacementPoly& o) const { return dim_ == o.dim_ && coeffs_ == o.coeffs_; }

  /// Product truncated at y-degree `max_degree` (negative: no truncation).
  DisplacementPoly multiply(const DisplacementPoly& o, int max_degree = -1) const;
  /// Laplacian in y.
  DisplacementPoly laplacian_y() const;
  /// Drop all monomials with |beta| > max_degree.
  DisplacementPoly truncated(int max_degree) const;
  /// Swap coordinates i and j in both y and the jet multi-indices.
  DisplacementPoly permuted(int i, int j) const;

  void add(const MultiIndex& beta, const JetPoly& c);
  std::string to_string() const;

 private:
  int dim_;
  CoeffMap coeffs_;
};

/// One application of (-Laplacian_x + v(x)) at x = x' + y with jets at x':
/// the Laplacian acts on y, v enters as its Taylor jet. Result truncated at
/// y-degree `max_degree`; the default keeps everything exactly.
DisplacementPoly schrodinger_apply(const DisplacementPoly& f, int max_degree = -1);

/// Replace f(x' + y) by integral_0^1 sigma^n f(x' + sigma y) d sigma.
DisplacementPoly sigma_integrate(const DisplacementPoly& f, int n);

}  // namespace ssf
