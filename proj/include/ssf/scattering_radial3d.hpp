#pragma once

// Partial-wave scattering for radially symmetric potentials in d = 3:
// phase shifts (variable-phase method), the spectral shift function with a
// Born tail for high angular momenta, xi_2, bound states and the Levinson
// check at zero energy.

#include <complex>
#include <vector>

#include "ssf/potential.hpp"
#include "ssf/scattering_1d.hpp"

namespace ssf {

struct PhaseShiftOptions {
  double tolerance = 1e-11;  // ODE tolerance on the phases
};

struct PhaseShiftTable {
  double k = 0.0;
  std::vector<double> delta;  // delta[l], l = 0..L_max (+ any extra waves requested)
  int l_max = 0;              // waves summed exactly in xi
  double born_tail = 0.0;     // sum_{l > L_max} (2l+1) delta_l in the Born approximation
  double tail_error = 0.0;
};

/// Radius beyond which |v| is negligible at double precision.
double radial_truncation_radius(const Potential& p);

/// Riccati-Bessel functions x j_l(x) and x y_l(x) for l = 0..l_max.
void riccati_bessel(double x, int l_max, std::vector<double>& jhat, std::vector<double>& nhat);

/// L_max = ceil(k R) + 8 for the potential's support radius R.
int partial_wave_cutoff(const Potential& p, double k);

/// All phase shifts up to L_max + extra, plus the Born tail beyond L_max.
PhaseShiftTable phase_shift_table(const Potential& p, double k, int extra = 0, const PhaseShiftOptions& opts = {});

/// delta_l(k) on the branch with delta -> 0 as k -> inf.
double phase_shift(const Potential& p, int ell, double k, const PhaseShiftOptions& opts = {});

/// First Born approximation -k int v(r) j_l(kr)^2 r^2 dr.
double born_phase_shift(const Potential& p, int ell, double k);

/// xi(lambda) = -(1/pi) (sum_l (2l+1) delta_l + Born tail), lambda > 0; steps below 0.
double ssf_3d_value(const Potential& p, double lambda, const PhaseShiftOptions& opts = {});

struct RadialBoundState {
  int ell = 0;
  double energy = 0.0;
  int multiplicity = 1;  // 2l + 1
};

std::vector<RadialBoundState> bound_states_3d(const Potential& p);
/// Negative eigenvalues with multiplicity, ascending.
std::vector<double> eigenvalues_3d(const Potential& p);

SsfCurve ssf_3d(const Potential& p, const std::vector<double>& lambda_grid, const PhaseShiftOptions& opts = {});

/// xi_2(lambda) = xi(lambda) - (4 pi^2)^(-1) int v dx lambda^(1/2).
double regularized_ssf_3d(const Potential& p, double lambda, const PhaseShiftOptions& opts = {});

/// det S(lambda) = exp(2i sum_l (2l+1) delta_l) over l <= L_max + 10 (no Born tail).
std::complex<double> smatrix_det_3d(const Potential& p, double k, const PhaseShiftOptions& opts = {});

/// s-wave scattering length from the zero-energy regular solution.
double scattering_length(const Potential& p);

struct LevinsonReport {
  double xi_at_zero = 0.0;
  double extrapolation_error = 0.0;
  int bound_states = 0;  // with multiplicity
  double scattering_length = 0.0;
  bool resonant = false;
  bool applicable = true;  // false when a zero-energy resonance is flagged
  bool pass = false;       // |xi(0+) + N| within tolerance (non-resonant case only)
};

LevinsonReport levinson_check_3d(const Potential& p, const PhaseShiftOptions& opts = {});

}  // namespace ssf
