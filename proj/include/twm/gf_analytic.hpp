#pragma once

#include <functional>
#include <vector>

#include "twm/green_function.hpp"
#include "twm/model.hpp"

namespace twm {

// First-order (low conversion) kernel for the rs or sr block. Nonzero only
// on the band t' in [t - max(beta_r, beta_s) L, t - min(beta_r, beta_s) L];
// samples exactly on a band edge take half weight.
cplx low_ce_gf(const RegimeParams& params, const PumpSpec& pump, double t, double t_in, Block block);

// Fourier transform of the low-conversion rs kernel, with exp(+i w t) on the
// output and exp(-i w' t') on the input.
cplx low_ce_gf_freq(const RegimeParams& params, const PumpSpec& pump, double omega, double omega_in);

// Kernel variables of the velocity-matched (beta_s = beta_p) solution.
struct SsvmVariables {
  double tau, tau_in, zeta, zeta_in, xi, eta;
};
SsvmVariables ssvm_variables(const RegimeParams& params, const PumpSpec& pump, double t, double t_in);

// Pump energy between tau_in and tau (zero when tau < tau_in).
double ssvm_eta(const PumpSpec& pump, double tau, double tau_in);

// Smooth part of the exact kernel for beta_s = beta_p. The rr and ss blocks
// also carry a transmitted delta term, see ssvm_singular_part.
cplx ssvm_gf(const RegimeParams& params, const PumpSpec& pump, double t, double t_in, Block block);
SingularPart ssvm_singular_part(const RegimeParams& params, Block block);

// Sample axes for kernel matrices: one spacing that divides |beta_rs| L,
// input axes on a common lattice through the pump center, and output axes
// equal to the inputs delayed by beta_j L.
struct KernelAxes {
  Axis in_r, in_s, out_r, out_s;
};
KernelAxes kernel_axes(const RegimeParams& params, const PumpSpec& pump, int n_target = 1024);

GreenFunction sample_low_ce(const RegimeParams& params, const PumpSpec& pump, const KernelAxes& axes);
// `conversion_only` samples rs alone.
GreenFunction sample_ssvm(const RegimeParams& params, const PumpSpec& pump, const KernelAxes& axes,
                          bool conversion_only = false);

// Closed-form output for beta_r = beta_s with a real pump: a pointwise
// rotation between the channels.
FieldState ecop_output(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
                       const FieldState& input);

// Rotation angle P(t) of the co-propagating solution at z = L (input time t).
double ecop_angle(const RegimeParams& params, const PumpSpec& pump, double t);

struct LimitRow {
  double beta_rs;
  double rel_error;
};

// Direct quadrature of the velocity-matched conversion integral for a
// shrinking walk-off at fixed gamma, compared with the sinusoidal limit
// A_r(L, t) = i A_s(0, t - beta_r L) sin[gamma L A_p(t - beta_r L)].
std::vector<LimitRow> ssvm_to_ecop_limit_check(double gamma, double length, const PumpSpec& pump,
                                               const std::function<cplx(double)>& input,
                                               const std::vector<double>& beta_rs_values,
                                               const std::vector<double>& sample_times);

// g * integral_0^1 J0(|g| sqrt(s (1 - s))) ds, which equals 2 sin(g / 2).
double bessel_identity_lhs(double g);

// Splits a pump into its real envelope and the phase that the s-channel
// modes absorb.
struct Dechirped {
  PumpSpec pump;
  Chirp phase;
  double center = 0.0;

  double theta(double t) const { return phase.empty() ? 0.0 : phase(t - center); }
};
Dechirped dechirp_transform(const PumpSpec& pump);

}  // namespace twm
