#pragma once

// Finite-difference oracle, heat and resolvent traces by several routes,
// and the trace identities tying the spectral shift function to the
// integrated invariants.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ssf/potential.hpp"
#include "ssf/scattering_1d.hpp"

namespace ssf {

/// Dirichlet finite-difference discretization of H and H_0 on a box.
/// d = 1: one channel on [-L, L]. d = 3: one half-line channel [0, L] per
/// angular momentum l with weight 2l + 1.
struct GridOracle {
  int dim = 1;
  double half_width = 0.0;
  double mesh = 0.0;
  struct Channel {
    int ell = 0;
    int weight = 1;
    std::vector<double> diag;       // H diagonal
    std::vector<double> free_diag;  // H_0 diagonal
    double off = 0.0;               // common off-diagonal -1/h^2
    std::vector<double> eigenvalues;
    std::vector<double> free_eigenvalues;
  };
  std::vector<Channel> channels;

  /// sum_c w_c (sum f(E) - sum f(E_0)).
  template <class F>
  auto trace_difference(F f) const {
    decltype(f(0.0)) total{};
    for (const auto& c : channels) {
      decltype(f(0.0)) s{};
      for (double e : c.eigenvalues) s += f(e);
      for (double e : c.free_eigenvalues) s -= f(e);
      total += static_cast<double>(c.weight) * s;
    }
    return total;
  }
};

inline constexpr int kGridDimensionCap = 4000;

/// d = 1 box [-L, L]; d = 3 channels l = 0..l_max on [0, L].
GridOracle build_grid_oracle(const Potential& p, double half_width, double mesh, int l_max = 0);

/// Spectral shift data for one potential (d = 1 or radial d = 3), with a
/// memo of xi(k) values shared by all quadratures.
class SsfModel {
 public:
  explicit SsfModel(const Potential& p, int coefficient_count = 5);

  const Potential& potential() const { return potential_; }
  int dim() const { return potential_.dim(); }
  /// Negative eigenvalues with multiplicity.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// xi_0, xi_1, ... (only xi_0 for non-smooth potentials).
  const std::vector<double>& coefficients() const { return coefficients_; }
  double xi_k(double k) const;
  /// xi_j k^(d - 2 - 2j).
  double series_term(int j, double k) const;
  /// Momentum above which the asymptotic series is trusted for tails.
  double asymptotic_k() const { return asymptotic_k_; }
  const Ssf1d* one_dimensional() const { return ssf1d_ ? &*ssf1d_ : nullptr; }

 private:
  Potential potential_;
  std::optional<Ssf1d> ssf1d_;
  std::vector<double> eigenvalues_;
  std::vector<double> coefficients_;
  double asymptotic_k_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<double, double> memo_;
};

struct RouteValue {
  double value = 0.0;
  double error = 0.0;
};

struct ComplexRouteValue {
  std::complex<double> value{};
  double error = 0.0;
};

struct OracleOptions {
  double half_width = 0.0;  // 0: chosen from the potential
  double mesh = 0.0;        // 0: the finest mesh under the dimension cap
  int l_max = 0;            // d = 3 channels; 0: chosen from the energy scale
};

struct HeatTrace {
  double t = 0.0;
  RouteValue via_ssf;
  RouteValue via_oracle;
  RouteValue via_series;
};

/// Tr(exp(-tH) - exp(-tH_0)) by SSF quadrature, grid eigenvalues and the
/// five-term small-t series.
HeatTrace heat_trace_diff(const SsfModel& model, double t, const OracleOptions& oracle = {});

struct ResolventTrace {
  std::complex<double> z{};
  int m = 1;
  ComplexRouteValue via_ssf;
  ComplexRouteValue via_oracle;
  ComplexRouteValue via_series;  // terms n < series_terms
  int series_terms = 2;
};

/// Tr(R(z)^m - R_0(z)^m) by SSF quadrature, grid eigenvalues and the
/// large-|z| series.
ResolventTrace resolvent_trace_diff(const SsfModel& model, std::complex<double> z, int m,
                                    int series_terms = 2, const OracleOptions& oracle = {});

struct IdentityPiece {
  std::string name;
  double value = 0.0;
};

struct IdentityReport {
  std::string tag;  // integer_order, half_integer, heat, resolvent, birman_krein, levinson
  int dim = 1;
  int order = 0;
  std::string potential;
  std::vector<IdentityPiece> lhs;    // itemized left-hand side
  std::vector<IdentityPiece> extra;  // supplementary values (not part of the residual)
  double rhs = 0.0;
  double residual = 0.0;
  double error_budget = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  double lhs_total() const;
  /// Sets residual from the pieces and pass = |residual| <= tol and budget <= tol.
  void finish();
};

struct IdentityOptions {
  double tolerance = 1e-4;
};

/// int_0^inf (xi - sum_{j <= (d-3)/2 + n} xi_j lambda^(d/2-j-1)) lambda^(n-1) d lambda
/// + n^(-1) sum lambda_j^n = 0 (odd d).
IdentityReport trace_identity_integer(const SsfModel& model, int n, const IdentityOptions& opts = {});

/// d = 1: (-1)^n / pi int_0^inf ln|a| lambda^(n-1/2) d lambda
/// - (n+1/2)^(-1) sum |lambda_j|^(n+1/2) = delta_n.
IdentityReport trace_identity_half(const SsfModel& model, int n, const IdentityOptions& opts = {});

/// max over the grid of |det S(lambda) - exp(-2 pi i xi(lambda))|.
IdentityReport birman_krein_check(const SsfModel& model, const std::vector<double>& lambda_grid,
                                  double tolerance = 1e-6);

/// xi(0+) against minus the number of bound states.
IdentityReport levinson_check(const SsfModel& model, double tolerance = 1e-3);

/// det(H_grid - z) / det(H0_grid - z) (d = 1).
std::complex<double> determinant_oracle(const GridOracle& oracle, std::complex<double> z);

struct LogDerivativeCheck {
  std::complex<double> z{};
  std::complex<double> log_derivative;  // D'(z)/D(z) from the Jost determinant
  std::complex<double> grid_trace;      // Tr(R_0(z) - R(z)) on the grid
  double relative_error = 0.0;
};

/// D'/D = Tr(R_0 - R) with D from the Jost solution and the trace from the grid (d = 1).
LogDerivativeCheck log_derivative_check(const Potential& p, const GridOracle& oracle, std::complex<double> z);

/// Constant term of the large-lambda expansion of xi and the coefficients
/// c_n of the small-t heat expansion.
struct AsymptoticConstants {
  double gamma = 0.0;
  double gamma_error = 0.0;
  std::vector<double> c;        // c[n-1] = c_n, n = 1..
  std::vector<double> c_error;
};

AsymptoticConstants asymptotic_constants(const SsfModel& model, int max_n, const IdentityOptions& opts = {});

/// Least-squares fit A + B t of (heat trace - singular series) over the
/// given times; for odd d both coefficients vanish.
struct PurityFit {
  double constant = 0.0;
  double linear = 0.0;
  double fit_error = 0.0;
};

PurityFit odd_dimension_purity(const SsfModel& model, const std::vector<double>& times);

/// Gamma(a, x) for any real a (x > 0).
double upper_incomplete_gamma(double a, double x);

}  // namespace ssf
