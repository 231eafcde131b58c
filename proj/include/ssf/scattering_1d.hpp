#pragma once

// One-dimensional scattering for -psi'' + v psi = k^2 psi: Jost data,
// the perturbation determinant D(z) = a(sqrt z), bound states, the spectral
// shift function on both half-axes, the 2x2 scattering matrix and the
// eikonal amplitudes b_n.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ssf/potential.hpp"

namespace ssf {

using Complex = std::complex<double>;

struct JostOptions {
  double tolerance = 1e-12;  // ODE tolerance (absolute and relative)
  double x_max = 0.0;        // 0: chosen from the potential's decay
};

/// psi = e^{ikx} for x -> +inf, psi = a e^{ikx} + b e^{-ikx} for x -> -inf.
struct JostData {
  double k = 0.0;
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  double estimated_error = 0.0;
};

/// Half-width beyond which the potential is negligible at double precision
/// (or the cap for slowly decaying potentials).
double truncation_radius(const Potential& p);

JostData jost_solve(const Potential& p, double k, const JostOptions& opts = {});

/// a(k) for complex k with Im k >= 0, k != 0; a(i kappa) = D(-kappa^2).
Complex jost_a(const Potential& p, Complex k, const JostOptions& opts = {});

/// D(lambda + i0) = a(sqrt lambda), lambda > 0.
Complex perturbation_determinant_1d(const Potential& p, double lambda);
/// D(z) for z off [0, inf): a(sqrt z) with Im sqrt z > 0.
Complex perturbation_determinant_1d(const Potential& p, Complex z);

/// Negative eigenvalues, ascending.
std::vector<double> bound_states_1d(const Potential& p);

struct SsfCurve {
  std::vector<double> lambda_grid;
  std::vector<double> xi;
  std::vector<Complex> determinant;  // D(lambda + i0) on the grid (empty for d = 3)
  std::vector<double> negative_part;  // eigenvalues lambda_1 <= ... <= lambda_N
  std::string branch_anchor;

  /// Step value -#{lambda_j < lambda} for lambda < 0.
  double xi_negative(double lambda) const;
};

struct SsfOptions {
  /// Refine the internal momentum grid until phase increments are below pi/2.
  /// When false, the caller's grid is unwrapped as given and a coarse grid
  /// raises a refinement error.
  bool refine = true;
  double k_min = 1e-3;
  JostOptions jost;
};

struct ZeroEnergy1d {
  double xi_at_zero = 0.0;
  double extrapolation_error = 0.0;
  int bound_states = 0;
  bool resonant = false;             // a(0) finite
  double amplitude_ratio = 0.0;      // |a(k2)| k2 / (|a(k1)| k1), k2 = k1 / 10
  bool matches_minus_n = false;      // |xi(0+) + N| small
  bool matches_minus_n_plus_half = false;
};

/// Continuous-branch SSF evaluator for a fixed 1D potential.
class Ssf1d {
 public:
  explicit Ssf1d(const Potential& p, const SsfOptions& opts = {});

  const Potential& potential() const { return potential_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// High-energy coefficients xi_n of xi(lambda) ~ sum xi_n lambda^(-1/2-n).
  const std::vector<double>& coefficients() const { return coefficients_; }

  /// xi(lambda): continuous branch for lambda > 0, integer steps below 0.
  double xi(double lambda) const;
  /// xi(k^2), k > 0.
  double xi_k(double k) const;
  /// sum_{n < terms} xi_n k^(-1-2n).
  double series(double k, int terms) const;
  /// ln |a(k)| = ln |D(k^2 + i0)|.
  double ln_abs_a(double k) const;
  /// Momentum above which xi is taken from the phase nearest the series.
  double top_k() const { return k_top_; }
  /// Internal (refined) momentum table.
  const std::vector<double>& table_k() const { return table_k_; }
  const std::vector<double>& table_xi() const { return table_xi_; }

  ZeroEnergy1d zero_energy() const;

 private:
  double reference(double k) const;

  Potential potential_;
  SsfOptions opts_;
  std::vector<double> eigenvalues_;
  std::vector<double> coefficients_;
  std::vector<double> table_k_;
  std::vector<double> table_xi_;
  double k_top_ = 0.0;
};

/// SSF sampled on a positive lambda grid.
SsfCurve ssf_1d(const Potential& p, const std::vector<double>& lambda_grid, const SsfOptions& opts = {});

struct ScatteringMatrix {
  std::array<std::array<Complex, 2>, 2> s{};
  Complex det{1.0, 0.0};
  double unitarity_defect = 0.0;  // max |(S^* S - I)_ij|
};

/// S = [[t, r_right], [r_left, t]] with t = 1/a, r_left = b/a, r_right = -conj(b)/a.
ScatteringMatrix smatrix_1d(const Potential& p, double k, const JostOptions& opts = {});

struct WkbAmplitudes {
  int omega = 1;
  std::vector<double> x;                    // Chebyshev-Lobatto nodes, ascending
  std::vector<std::vector<double>> b;       // b[n][i] = b_n(x_i)
  std::vector<double> incoming_tail;        // max |b_n| over the outer half of the incoming side
  std::vector<double> outgoing_limit;       // b_n at the outgoing end of the box
};

/// b_0 = 1, b_{n+1}(x) = int_{-inf}^0 (-b_n'' + v b_n)(x + t omega) dt, n < N.
WkbAmplitudes wkb_amplitudes_1d(const Potential& p, int max_n, int omega, int nodes = 512);

}  // namespace ssf
