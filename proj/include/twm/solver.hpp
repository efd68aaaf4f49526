#pragma once

#include <vector>

#include "twm/model.hpp"

namespace twm {

// Integrates the coupled-mode equations from z = 0 to z = L in the frame
// co-moving with the s channel (u = t - beta_s z). In that frame the s
// channel is stationary and the r channel drifts by beta_rs per unit
// length. When beta_rs * dz is a whole number of cells the drift is an
// exact index shift; otherwise it falls back to linear interpolation.
//
// Each z-step is split symmetrically: half coupling, drift, half coupling.
// The coupling is a pointwise 2x2 linear ODE integrated by classical RK4,
// precomputed per cell and applied to every column of a batch.
class Propagator {
 public:
  // `input_offset` is the lab time of grid.t(0) minus t_min at z = 0
  // (nonzero only for inputs that are themselves earlier outputs).
  Propagator(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
             double input_offset = 0.0);

  // Propagates each column pair (r.col(j), s.col(j)) in place. Rows are
  // grid samples; on return, row i holds lab time grid.t(i) + beta_s L.
  void run(CMat& r, CMat& s) const;

  double output_offset() const { return input_offset_ + params_.beta_s() * params_.length(); }
  int substeps() const { return substeps_; }
  bool exact_shift() const { return exact_shift_; }

 private:
  // Pointwise propagator of the coupling ODE over [z0, z0 + h], stored
  // only on the cells the pump reaches; identity elsewhere.
  struct Coupling {
    int lo = 0, hi = 0;
    std::vector<cplx> m00, m01, m10, m11;
  };
  Coupling coupling(double z0, double h, int substeps) const;

  RegimeParams params_;
  PumpSpec pump_;
  TemporalGrid grid_;
  double input_offset_;
  double dz_;
  double courant_;   // drift per step in cells (signed)
  bool exact_shift_;
  int shift_;        // +-1 or 0 when exact
  int substeps_;
};

FieldState propagate(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
                     const FieldState& input);

double energy(const FieldState& state, const TemporalGrid& grid);

}  // namespace twm
