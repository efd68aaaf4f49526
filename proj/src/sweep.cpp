#include "twm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "twm/errors.hpp"
#include "twm/gf_analytic.hpp"
#include "twm/io.hpp"

#ifndef TWM_VERSION
#define TWM_VERSION "dev"
#endif

namespace twm {

namespace {

const char* const kAxisNames[] = {"gamma_bar", "tau_p", "beta_p", "beta_r", "beta_rs_L"};

void apply(PointParams& p, const std::string& axis, double v) {
  if (axis == "gamma_bar") {
    // Keeps the coupling phase of the base point.
    p.gamma_bar = std::abs(p.gamma_bar) > 0.0 ? v * std::exp(cplx(0.0, std::arg(p.gamma_bar))) : cplx(v);
  } else if (axis == "tau_p") {
    p.tau_p = v;
  } else if (axis == "beta_p") {
    p.beta_p = v;
  } else if (axis == "beta_r") {
    p.beta_r = v;
  } else if (axis == "beta_rs_L") {
    const double brs = std::abs(p.beta_r - p.beta_s);
    if (brs < kEpsBeta) throw RegimeError("beta_rs_L axis needs beta_r != beta_s");
    p.length = std::abs(v) / brs;
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
}

std::string describe(const SweepSpec& spec) {
  std::ostringstream s;
  if (spec.engine == Engine::numeric)
    s << "basis " << spec.numeric.n_r << "x" << spec.numeric.n_s << ", tol_leak " << spec.numeric.tol_leak;
  else
    s << "kernel samples " << spec.n_t;
  return s.str();
}

}  // namespace

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::numeric: return "numeric";
    case Engine::analytic_ssvm: return "analytic-ssvm";
    case Engine::low_ce: return "low-ce";
  }
  return "?";
}

Engine engine_from_string(const std::string& name) {
  if (name == "numeric") return Engine::numeric;
  if (name == "analytic-ssvm") return Engine::analytic_ssvm;
  if (name == "low-ce") return Engine::low_ce;
  throw ConfigError("unknown engine '" + name + "' (numeric, analytic-ssvm, low-ce)");
}

RegimeParams PointParams::regime() const {
  return RegimeParams(beta_r, beta_s, beta_p, length, gamma_bar * (beta_r - beta_s));
}

PumpSpec pump_with_width(const PumpSpec& pump, double tau_p) {
  if (!(tau_p > 0.0) || !std::isfinite(tau_p)) throw ConfigError("tau_p must be positive");
  PumpSpec out = pump;
  switch (pump.shape()) {
    case PumpShape::gaussian: out = PumpSpec::gaussian(tau_p, pump.center()); break;
    case PumpShape::hermite_gauss_1: out = PumpSpec::hermite_gauss_1(tau_p, pump.center()); break;
    case PumpShape::tabulated: {
      // Stretch the table about its center to the requested rms width.
      const double k = tau_p / pump.tau_p();
      if (std::abs(k - 1.0) < 1e-12) return pump;
      std::vector<double> t = pump.table_times();
      for (double& x : t) x = pump.center() + (x - pump.center()) * k;
      out = PumpSpec::tabulated(t, pump.table_amplitudes());
      break;
    }
  }
  return pump.chirped() ? out.with_chirp(pump.chirp()) : out;
}

void SweepSpec::validate() const {
  for (const auto& axis : axes) {
    if (std::find(std::begin(kAxisNames), std::end(kAxisNames), axis.name) == std::end(kAxisNames))
      throw ConfigError("unknown sweep axis '" + axis.name + "'");
    if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.name + "' has no values");
    for (double v : axis.values)
      if (!std::isfinite(v)) throw ConfigError("sweep axis '" + axis.name + "' has a non-finite value");
  }
  if (ce_depth < 1) throw ConfigError("ce_depth must be at least 1");
  if (fidelity_depth < 0) throw ConfigError("fidelity_depth must be non-negative");
  if (n_t < 16) throw ConfigError("n_t must be at least 16");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  for (double v : {base.beta_r, base.beta_s, base.beta_p, base.length, base.tau_p, base.gamma_bar.real(),
                   base.gamma_bar.imag()})
    if (!std::isfinite(v)) throw ConfigError("base parameters must be finite");
}

std::size_t SweepSpec::size() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.values.size();
  return n;
}

PointParams point_at(const SweepSpec& spec, std::size_t index, std::vector<double>* coords) {
  PointParams p = spec.base;
  std::vector<std::size_t> digits(spec.axes.size());
  for (std::size_t a = spec.axes.size(); a-- > 0;) {
    const std::size_t n = spec.axes[a].values.size();
    digits[a] = index % n;
    index /= n;
  }
  if (coords) coords->clear();
  // Applied in declaration order so that beta_rs_L sees the slownesses
  // set by earlier axes.
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    const double v = spec.axes[a].values[digits[a]];
    apply(p, spec.axes[a].name, v);
    if (coords) coords->push_back(v);
  }
  return p;
}

SweepRecord evaluate_point(const SweepSpec& spec, const PointParams& point) {
  SweepRecord rec;
  rec.params = point;
  try {
    const RegimeParams params = point.regime();
    const PumpSpec pump = pump_with_width(spec.pump, point.tau_p);
    GreenFunction gf;
    switch (spec.engine) {
      case Engine::low_ce:
        gf = sample_low_ce(params, pump, kernel_axes(params, pump, spec.n_t));
        break;
      case Engine::analytic_ssvm:
        if (classify_regime(params) != Regime::SSVM)
          throw RegimeError("analytic-ssvm engine needs beta_s = beta_p (got " + to_string(classify_regime(params)) +
                            ")");
        gf = sample_ssvm(params, pump, kernel_axes(params, pump, spec.n_t), true);
        break;
      case Engine::numeric: {
        NumericOptions o = spec.numeric;
        o.conversion_only = true;
        if (spec.workers > 1) o.workers = 1;  // parallel over points instead
        gf = assemble_gf(plan_numeric(params, pump, o));
        break;
      }
    }
    const int keep = std::max(spec.modes ? spec.ce_depth : 0, spec.fidelity_depth);
    const SchmidtResult r = decompose(gf, {.n_modes = keep});
    const Eigen::Index depth = std::min<Eigen::Index>(spec.ce_depth, r.rho.size());
    rec.rho = r.rho.head(depth);
    rec.ce = r.ce.head(depth);
    rec.selectivity = r.selectivity;
    rec.separability = r.separability;
    if (spec.modes) {
      const int m = std::min(spec.ce_depth, r.stored_modes());
      rec.modes = ModeData{r.axis_in_s, r.axis_out_r, r.modes_in_s.leftCols(m), r.modes_out_r.leftCols(m)};
    }
    const int nf = std::min(spec.fidelity_depth, r.stored_modes());
    rec.fidelity.resize(nf);
    for (int k = 0; k < nf; ++k) rec.fidelity(k) = shape_fidelity(r, k);
  } catch (const ConfigError& e) {
    rec.error_kind = "config";
    rec.error = e.what();
  } catch (const NumericalError& e) {
    rec.error_kind = "numerical";
    rec.error = e.what();
  } catch (const std::exception& e) {
    rec.error_kind = "error";
    rec.error = e.what();
  }
  if (!rec.ok()) {
    rec.rho.resize(0);
    rec.ce.resize(0);
    rec.fidelity.resize(0);
    rec.modes.reset();
    rec.selectivity = rec.separability = std::nan("");
  }
  return rec;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult out;
  for (const auto& axis : spec.axes) out.axis_names.push_back(axis.name);
  out.ce_depth = spec.ce_depth;
  const std::size_t n = spec.size();
  out.records.resize(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      std::vector<double> coords;
      const PointParams p = point_at(spec, i, &coords);
      SweepRecord rec = evaluate_point(spec, p);
      rec.index = static_cast<int>(i);
      rec.coords = std::move(coords);
      out.records[i] = std::move(rec);
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(spec.workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  out.provenance.engine = to_string(spec.engine);
  out.provenance.version = TWM_VERSION;
  out.provenance.resolution = describe(spec);
  out.provenance.config = spec_to_json_text(spec);
  out.provenance.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace twm
