#pragma once

#include <vector>

#include "twm/gf_analytic.hpp"
#include "twm/green_function.hpp"
#include "twm/model.hpp"

namespace twm {

// Knobs of the test-signal construction. Zero widths select the automatic
// choice: each channel's basis spans the input times that meet the pump,
// padded by `edge` pump widths, with some headroom for the top order.
struct NumericOptions {
  int n_r = 150;
  int n_s = 150;
  double width_r = 0.0;
  double width_s = 0.0;
  double edge = 3.0;
  double dt_factor = 1.0;  // time step relative to the finest basis feature
  // Extra output orders, as a fraction of the input size: coupling to a
  // short pump widens the spectrum of the highest input orders.
  double out_margin = 0.25;
  double tol_leak = 1e-3;
  bool conversion_only = false;  // propagate s-channel inputs only (rs, ss)
  int workers = 1;
};

// Fully resolved numeric construction: the four bases (centers in lab
// time) and the propagation grid (in the frame moving with the s channel).
struct NumericPlan {
  RegimeParams params;
  PumpSpec pump;
  TemporalGrid grid;
  BasisSpec in_r, in_s, out_r, out_s;
  double tol_leak = 1e-3;
  bool conversion_only = false;
  int workers = 1;
};

NumericPlan plan_numeric(const RegimeParams& params, const PumpSpec& pump, const NumericOptions& options = {});

// Same as above but on a caller-supplied grid with one basis width for
// both channels.
NumericPlan plan_numeric(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid, int n_r,
                         int n_s, double width);

// Column l of rs/ss is the projection of the propagated s-input B_s,l onto
// the output bases; rr/sr likewise from r-channel inputs. Throws
// TruncationError when a column keeps less than 1 - tol_leak of its energy.
GreenFunction assemble_gf(const NumericPlan& plan);

struct LeakageRow {
  char channel;  // input channel
  int column;
  double leakage;  // 1 - captured energy
};
std::vector<LeakageRow> leakage_report(const NumericPlan& plan);

// Basis-form -> kernel samples G(t, t') on the given axes.
GreenFunction to_grid_form(const GreenFunction& gf, const KernelAxes& axes);
// On each basis's own sampling axis.
GreenFunction to_grid_form(const GreenFunction& gf);
// Grid-form -> coefficients in the given bases (singular parts included).
GreenFunction to_basis_form(const GreenFunction& gf, const BasisSpec& in_r, const BasisSpec& in_s,
                            const BasisSpec& out_r, const BasisSpec& out_s);

}  // namespace twm
