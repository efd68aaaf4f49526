#include "twm/gf_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <mutex>
#include <thread>

#include "twm/errors.hpp"
#include "twm/solver.hpp"

namespace twm {

namespace {

double reach(const BasisSpec& b) { return (std::sqrt(2.0 * b.size + 1.0) + 6.0) * b.width; }

// Input times of channel j that meet the pump, collapsed to the pump center.
std::pair<double, double> nominal_input(const RegimeParams& params, const PumpSpec& pump, char channel) {
  const double walk = (channel == 'r' ? -params.beta_rp() : -params.beta_sp()) * params.length();
  return {pump.center() + std::min(0.0, walk), pump.center() + std::max(0.0, walk)};
}

void fill_bases(NumericPlan& plan, int n_r, int n_s, double w_r, double w_s, double out_margin) {
  const auto& p = plan.params;
  const auto [rlo, rhi] = nominal_input(p, plan.pump, 'r');
  const auto [slo, shi] = nominal_input(p, plan.pump, 's');
  plan.in_r = {n_r, w_r, 0.5 * (rlo + rhi)};
  plan.in_s = {n_s, w_s, 0.5 * (slo + shi)};
  auto grown = [&](int n) { return n + static_cast<int>(std::ceil(out_margin * n)); };
  plan.out_r = {grown(n_r), w_r, plan.in_r.center + p.beta_r() * p.length()};
  plan.out_s = {grown(n_s), w_s, plan.in_s.center + p.beta_s() * p.length()};
}

void check_sizes(int n_r, int n_s) {
  if (n_r < 1 || n_s < 1) throw ConfigError("basis sizes must be positive");
}

struct Projection {
  CMat rr, rs, sr, ss;
  std::vector<LeakageRow> leakage;
};

// Propagates inputs `cols` of one channel and projects onto both output bases.
void run_columns(const NumericPlan& plan, const Propagator& prop, char channel, int first, int last,
                 const Mat& b_in, const Mat& b_out_r, const Mat& b_out_s, CMat& to_r, CMat& to_s,
                 std::vector<double>& captured) {
  const int n = last - first;
  if (n <= 0) return;
  const double dt = plan.grid.dt();
  const int n_t = plan.grid.n_t();
  CMat r = CMat::Zero(n_t, n), s = CMat::Zero(n_t, n);
  (channel == 'r' ? r : s) = b_in.middleCols(first, n).cast<cplx>();
  prop.run(r, s);
  // Column by column: a product over the whole chunk would round
  // differently depending on the chunk width.
  for (int j = 0; j < n; ++j) {
    const int l = first + j;
    to_r.col(l) = dt * (b_out_r.transpose() * r.col(j).real() + cplx(0, 1) * (b_out_r.transpose() * r.col(j).imag()));
    to_s.col(l) = dt * (b_out_s.transpose() * s.col(j).real() + cplx(0, 1) * (b_out_s.transpose() * s.col(j).imag()));
    const double in_energy = dt * b_in.col(l).squaredNorm();
    captured[l] = (to_r.col(l).squaredNorm() + to_s.col(l).squaredNorm()) / in_energy;
  }
}

Projection project(const NumericPlan& plan) {
  const auto& g = plan.grid;
  plan.grid.check_coverage(plan.params, plan.pump);
  const Propagator prop(plan.params, plan.pump, g);
  const Vec in_t = g.axis().samples();
  const Vec out_t = in_t.array() + prop.output_offset();
  const Mat b_out_r = hermite_gauss_functions(plan.out_r.size, plan.out_r.width, plan.out_r.center, out_t);
  const Mat b_out_s = hermite_gauss_functions(plan.out_s.size, plan.out_s.width, plan.out_s.center, out_t);

  Projection out;
  const int workers = std::max(1, plan.workers);
  auto one_channel = [&](char channel, const BasisSpec& in, CMat& to_r, CMat& to_s) {
    const Mat b_in = hermite_gauss_functions(in.size, in.width, in.center, in_t);
    to_r = CMat::Zero(plan.out_r.size, in.size);
    to_s = CMat::Zero(plan.out_s.size, in.size);
    std::vector<double> captured(in.size, 0.0);
    // Columns are independent, so the split does not change any value.
    const int chunk = (in.size + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int first = 0; first < in.size; first += chunk) {
      const int last = std::min(in.size, first + chunk);
      pool.emplace_back([&, first, last] {
        try {
          run_columns(plan, prop, channel, first, last, b_in, b_out_r, b_out_s, to_r, to_s, captured);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (int l = 0; l < in.size; ++l) out.leakage.push_back({channel, l, 1.0 - captured[l]});
  };
  one_channel('s', plan.in_s, out.rs, out.ss);
  if (!plan.conversion_only) one_channel('r', plan.in_r, out.rr, out.sr);
  return out;
}

}  // namespace

NumericPlan plan_numeric(const RegimeParams& params, const PumpSpec& pump, const NumericOptions& options) {
  check_sizes(options.n_r, options.n_s);
  if (!(options.dt_factor > 0.0) || !(options.edge >= 0.0) || !(options.tol_leak > 0.0) ||
      !(options.out_margin >= 0.0))
    throw ConfigError("numeric options must be positive");
  const double tp = pump.tau_p();
  auto auto_width = [&](char channel, int n) {
    const auto [lo, hi] = nominal_input(params, pump, channel);
    // Spread the top order over the support, but never narrower than the
    // pump: pump-locked modes have that width and narrower inputs only
    // scatter into broadband outputs the output basis cannot hold.
    return std::max(tp, (0.5 * (hi - lo) + options.edge * tp) * 1.2 / std::sqrt(2.0 * n + 1.0));
  };
  const double w_r = options.width_r > 0.0 ? options.width_r : auto_width('r', options.n_r);
  const double w_s = options.width_s > 0.0 ? options.width_s : auto_width('s', options.n_s);

  NumericPlan plan{params, pump, TemporalGrid(0.0, 1.0, 2, 1), {}, {}, {}, {}, options.tol_leak,
                   options.conversion_only, options.workers};
  fill_bases(plan, options.n_r, options.n_s, w_r, w_s, options.out_margin);

  const double feature = std::min(w_r / std::sqrt(2.0 * plan.out_r.size + 1.0), w_s / std::sqrt(2.0 * plan.out_s.size + 1.0));
  const double dt = std::min(options.dt_factor * feature, tp / 4.0);
  // Basis extents in the s-channel frame; the r output frame sits beta_rs L later.
  const double shift = params.beta_rs() * params.length();
  double lo = std::min({plan.in_r.center - reach(plan.in_r), plan.in_r.center + shift - reach(plan.out_r),
                        plan.in_s.center - reach(plan.out_s)});
  double hi = std::max({plan.in_r.center + reach(plan.in_r), plan.in_r.center + shift + reach(plan.out_r),
                        plan.in_s.center + reach(plan.out_s)});
  // Pump-center landmarks that the coverage check asks for, padded by 5 tau_p.
  const double c = pump.center();
  const double ps = (params.beta_p() - params.beta_s()) * params.length();
  for (double x : {c, c + ps, c + ps - shift, c + shift}) {
    lo = std::min(lo, x - 5.0 * tp);
    hi = std::max(hi, x + 5.0 * tp);
  }
  plan.grid = TemporalGrid::aligned(params, lo, hi, dt);
  return plan;
}

NumericPlan plan_numeric(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid, int n_r,
                         int n_s, double width) {
  check_sizes(n_r, n_s);
  if (!(width > 0.0)) throw ConfigError("basis width must be positive");
  NumericPlan plan{params, pump, grid, {}, {}, {}, {}, 1e-3, false, 1};
  fill_bases(plan, n_r, n_s, width, width, NumericOptions{}.out_margin);
  const int top = std::max(plan.out_r.size, plan.out_s.size);
  if (grid.dt() > M_PI * width / std::sqrt(2.0 * top + 1.0))
    throw ResolutionError("grid spacing " + std::to_string(grid.dt()) + " cannot resolve basis order " +
                          std::to_string(top - 1));
  return plan;
}

std::vector<LeakageRow> leakage_report(const NumericPlan& plan) { return project(plan).leakage; }

GreenFunction assemble_gf(const NumericPlan& plan) {
  Projection p = project(plan);
  const auto worst = std::max_element(p.leakage.begin(), p.leakage.end(),
                                      [](const auto& a, const auto& b) { return a.leakage < b.leakage; });
  if (worst != p.leakage.end() && worst->leakage > plan.tol_leak) {
    std::ostringstream msg;
    msg << "test-signal basis too small: input " << worst->channel << " column " << worst->column
        << " leaks " << worst->leakage << " of its energy (tolerance " << plan.tol_leak << ")";
    throw TruncationError(msg.str(), worst->column, worst->leakage);
  }
  GreenFunction gf;
  gf.form = GfForm::basis;
  gf.rr = std::move(p.rr);
  gf.rs = std::move(p.rs);
  gf.sr = std::move(p.sr);
  gf.ss = std::move(p.ss);
  gf.basis_in_r = plan.in_r;
  gf.basis_in_s = plan.in_s;
  gf.basis_out_r = plan.out_r;
  gf.basis_out_s = plan.out_s;
  gf.metadata["engine"] = "numeric";
  gf.metadata["n_r"] = std::to_string(plan.in_r.size);
  gf.metadata["n_s"] = std::to_string(plan.in_s.size);
  gf.metadata["max_leakage"] = worst == p.leakage.end() ? "0" : std::to_string(worst->leakage);
  gf.metadata["n_t"] = std::to_string(plan.grid.n_t());
  gf.metadata["n_z"] = std::to_string(plan.grid.n_z());
  gf.validate();
  return gf;
}

GreenFunction to_grid_form(const GreenFunction& gf, const KernelAxes& axes) {
  if (gf.form != GfForm::basis) throw ConfigError("to_grid_form expects a basis-form Green function");
  GreenFunction out = gf;
  out.form = GfForm::grid;
  out.in_r = axes.in_r;
  out.in_s = axes.in_s;
  out.out_r = axes.out_r;
  out.out_s = axes.out_s;
  out.rr_delta.reset();
  out.ss_delta.reset();
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss}) {
    if (!gf.has(b)) continue;
    const char o = output_channel(b), i = input_channel(b);
    const Mat bo = gf.out_basis(o).sample(out.out_axis(o));
    const Mat bi = gf.in_basis(i).sample(out.in_axis(i));
    out.block(b) = bo.cast<cplx>() * gf.block(b) * bi.transpose().cast<cplx>();
  }
  out.validate();
  return out;
}

GreenFunction to_grid_form(const GreenFunction& gf) {
  return to_grid_form(gf, {gf.basis_in_r.sampling_axis(), gf.basis_in_s.sampling_axis(),
                           gf.basis_out_r.sampling_axis(), gf.basis_out_s.sampling_axis()});
}

GreenFunction to_basis_form(const GreenFunction& gf, const BasisSpec& in_r, const BasisSpec& in_s,
                            const BasisSpec& out_r, const BasisSpec& out_s) {
  if (gf.form != GfForm::grid) throw ConfigError("to_basis_form expects a grid-form Green function");
  GreenFunction out = gf;
  out.form = GfForm::basis;
  out.basis_in_r = in_r;
  out.basis_in_s = in_s;
  out.basis_out_r = out_r;
  out.basis_out_s = out_s;
  out.rr_delta.reset();
  out.ss_delta.reset();
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss}) {
    if (!gf.has(b)) continue;
    const char o = output_channel(b), i = input_channel(b);
    const Axis& ao = gf.out_axis(o);
    const Axis& ai = gf.in_axis(i);
    const Mat bo = out.out_basis(o).sample(ao) * std::sqrt(ao.step);
    const Mat bi = out.in_basis(i).sample(ai) * std::sqrt(ai.step);
    out.block(b) = bo.transpose().cast<cplx>() * gf.operator_matrix(b) * bi.cast<cplx>();
  }
  out.validate();
  return out;
}

}  // namespace twm
