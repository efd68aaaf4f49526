#pragma once

#include <string>

#include "twm/green_function.hpp"
#include "twm/model.hpp"

namespace twm {

// Number of leading values reported in tables and exports.
inline constexpr int kReportedModes = 10;

// Singular-value decomposition of the conversion block and the paired
// transmission data. Mode columns are sampled functions with unit
// continuous norm on their axes.
struct SchmidtResult {
  Vec rho;        // full rs spectrum, nonincreasing
  Vec ce;         // rho^2
  Vec tau;        // |tau_n| for the stored modes (empty without rr/ss)
  Vec tau_phase;  // residual pairing phase per mode
  double selectivity = 0.0;
  double separability = 0.0;

  CMat modes_in_s, modes_out_r, modes_in_r, modes_out_s;
  Axis axis_in_s, axis_out_r, axis_in_r, axis_out_s;

  // Smallest overlap between a paired mode and the matching singular vector
  // of the sr block; near 1 unless the spectrum is nearly degenerate.
  double pairing_overlap = 1.0;
  std::string pairing_method = "none";

  Vec reported_rho() const { return rho.head(std::min<Eigen::Index>(rho.size(), kReportedModes)); }
  int stored_modes() const { return static_cast<int>(modes_in_s.cols()); }
};

struct DecomposeOptions {
  int n_modes = kReportedModes;  // mode columns kept (negative keeps all)
};

SchmidtResult decompose(const GreenFunction& gf, const DecomposeOptions& options = {});

// rho_1^4 / sum rho_n^2 (0 for an all-zero list).
double selectivity(const Vec& rho);
// rho_1^2 / sum rho_n^2.
double separability(const Vec& rho);

struct ModeCoefficients {
  CVec c;  // r-channel output coefficients
  CVec d;  // s-channel output coefficients
};
// c_n = tau_n a_n + rho_n b_n, d_n = tau_n b_n - rho_n a_n, with a_n the
// r-input and b_n the s-input coefficients. Missing tau values are taken
// as sqrt(1 - rho^2).
ModeCoefficients beamsplitter_apply(const SchmidtResult& result, const CVec& a, const CVec& b);

// Overlap |<phi_k, Psi_k>|^2 of input s mode k and output r mode k (0-based),
// maximized over a relative time shift.
double shape_fidelity(const SchmidtResult& result, int k);

// Frequency-domain kernel: values(w, w') = sum exp(i w t) G(t, t') exp(-i w' t') dt dt'.
struct SpectralKernel {
  CMat values;
  Axis omega_out, omega_in;

  // Operator on orthonormal frequency coordinates (same singular values as
  // the time-domain operator).
  CMat operator_matrix() const;
};

SpectralKernel gf_fourier(const GreenFunction& gf, Block block = Block::rs);

}  // namespace twm
