#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twm/gf_numeric.hpp"
#include "twm/model.hpp"
#include "twm/schmidt.hpp"

namespace twm {

enum class Engine { numeric, analytic_ssvm, low_ce };

std::string to_string(Engine engine);
Engine engine_from_string(const std::string& name);

// Swept parameter: gamma_bar, tau_p, beta_p, beta_r or beta_rs_L (the
// latter changes L at fixed slownesses).
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

// Coordinates of one evaluation. gamma_bar is held fixed when slownesses
// move, so gamma = gamma_bar * beta_rs follows them.
struct PointParams {
  double beta_r = 0.0, beta_s = 0.0, beta_p = 0.0, length = 1.0;
  cplx gamma_bar = 0.0;
  double tau_p = 1.0;

  RegimeParams regime() const;
};

struct SweepSpec {
  PointParams base;
  PumpSpec pump = PumpSpec::gaussian(1.0);  // shape, center, chirp; width from base.tau_p
  std::vector<SweepAxis> axes;
  Engine engine = Engine::low_ce;
  int n_t = 1024;         // kernel samples along the longer axis (analytic engines)
  NumericOptions numeric;  // numeric engine
  int ce_depth = kReportedModes;
  bool modes = false;       // keep the leading conversion modes
  int fidelity_depth = 0;   // shape fidelity of the first k mode pairs
  int workers = 1;

  // Throws ConfigError on unknown axes, non-finite values or bad sizes.
  void validate() const;
  std::size_t size() const;
};

struct ModeData {
  Axis axis_in, axis_out;
  CMat in, out;  // s-input and r-output modes, one column each
};

struct SweepRecord {
  int index = 0;
  std::vector<double> coords;  // one per axis, declaration order
  PointParams params;
  Vec rho, ce;
  double selectivity = 0.0;
  double separability = 0.0;
  std::optional<ModeData> modes;
  Vec fidelity;
  std::string error_kind;  // empty when the point succeeded
  std::string error;

  bool ok() const { return error_kind.empty(); }
};

struct Provenance {
  std::string engine;
  std::string version;
  std::string resolution;  // grid or basis description
  std::string config;  // effective specification as JSON text
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  int ce_depth = kReportedModes;
  std::vector<SweepRecord> records;  // row-major over the axes
  Provenance provenance;
};

// Evaluates one point; failures are reported in the record, not thrown.
SweepRecord evaluate_point(const SweepSpec& spec, const PointParams& point);

// Every combination of axis values, the last axis varying fastest.
SweepResult run_sweep(const SweepSpec& spec);

// Point parameters of sweep index `index`.
PointParams point_at(const SweepSpec& spec, std::size_t index, std::vector<double>* coords = nullptr);

PumpSpec pump_with_width(const PumpSpec& pump, double tau_p);

}  // namespace twm
