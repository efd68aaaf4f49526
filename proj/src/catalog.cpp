#include "twm/catalog.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "twm/errors.hpp"
#include "twm/gf_analytic.hpp"
#include "twm/solver.hpp"

namespace twm {

namespace {

using Runner = std::function<void(CaseReport&, int workers)>;

struct CaseDef {
  std::string id;
  std::string description;
  Runner run;
};

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

SweepSpec point_spec(Engine engine, PointParams base, const PumpSpec& pump) {
  SweepSpec s;
  s.engine = engine;
  s.base = base;
  s.pump = pump;
  return s;
}

const SweepRecord& single(CaseReport& rep, const SweepSpec& spec) {
  rep.results.push_back(run_sweep(spec));
  const SweepRecord& r = rep.results.back().records.at(0);
  if (!r.ok()) throw NumericalError("case " + rep.id + " failed: " + r.error);
  return r;
}

// Low-conversion kernel at gamma_bar = 0.01. The quoted values are
// relative to the leading efficiency, and S / gamma_bar^2 with the leading
// efficiency normalized to gamma_bar^2 is the separability.
Runner low_ce_case(double br, double bs, double bp, double tau_p, bool hg1, std::vector<double> ratios,
                   double ratio_tol, CheckKind ratio_kind, double s_norm) {
  return [=](CaseReport& rep, int) {
    const PumpSpec pump = hg1 ? PumpSpec::hermite_gauss_1(tau_p) : PumpSpec::gaussian(tau_p);
    const SweepRecord& r = single(rep, point_spec(Engine::low_ce, {br, bs, bp, 1.0, 0.01, tau_p}, pump));
    for (std::size_t k = 0; k < ratios.size(); ++k)
      rep.checks.push_back(make_check("ce_" + std::to_string(k + 1) + "/ce_1", r.ce(k) / r.ce(0), ratios[k],
                                      k == 0 ? 1e-12 : ratio_tol, k == 0 ? CheckKind::abs : ratio_kind));
    rep.checks.push_back(make_check("S/gamma_bar^2 (leading CE normalized)", r.separability, s_norm, 0.02, CheckKind::rel));
    rep.metadata["normalization"] = "efficiencies relative to the leading mode";
    rep.metadata["ce_1/gamma_bar^2 (absolute)"] = std::to_string(r.ce(0) / 1e-4);
  };
}

// Maximum of the selectivity over a sweep, with its location.
struct Peak {
  double value = -1.0;
  PointParams at;
};
Peak peak(const SweepResult& res) {
  Peak p;
  for (const auto& r : res.records) {
    if (!r.ok()) throw NumericalError("sweep point " + std::to_string(r.index) + " failed: " + r.error);
    if (r.selectivity > p.value) p = {r.selectivity, r.params};
  }
  return p;
}

void fig6(CaseReport& rep, int workers) {
  SweepSpec s = point_spec(Engine::analytic_ssvm, {2.0, 0.0, 0.0, 1.0, 1.0, 0.1}, PumpSpec::gaussian(0.1));
  s.axes = {{"gamma_bar", range(0.1, 2.5, 0.05)}};
  s.workers = workers;
  rep.results.push_back(run_sweep(s));
  const Peak p = peak(rep.results.back());
  rep.checks.push_back(make_check("max selectivity", p.value, 0.81, 0.02, CheckKind::abs));
  rep.checks.push_back(make_check("gamma_bar at max", p.at.gamma_bar.real(), 1.0, 0.1, CheckKind::abs));
  rep.metadata["engine"] = "exact velocity-matched kernel";
}

void ssvm_limit(CaseReport& rep, int workers) {
  SweepSpec s = point_spec(Engine::analytic_ssvm, {2.0, 0.0, 0.0, 1.0, 1.0, 0.01}, PumpSpec::gaussian(0.01));
  s.axes = {{"gamma_bar", range(0.8, 1.5, 0.01)}};
  s.n_t = 2048;
  s.workers = workers;
  rep.results.push_back(run_sweep(s));
  const Peak p = peak(rep.results.back());
  rep.checks.push_back(make_check("max selectivity >= 0.83", p.value, 0.83, 0.0, CheckKind::at_least));
  rep.checks.push_back(make_check("max selectivity <= 0.87", p.value, 0.87, 0.0, CheckKind::at_most));
  rep.metadata["gamma_bar at max"] = std::to_string(p.at.gamma_bar.real());
}

void scup_opt(CaseReport& rep, int workers) {
  SweepSpec s = point_spec(Engine::numeric, {4.0, 0.0, 2.0, 1.0, 1.0, 1.0}, PumpSpec::gaussian(1.0));
  s.axes = {{"tau_p", {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}}, {"gamma_bar", range(0.4, 1.4, 0.05)}};
  s.workers = workers;
  rep.results.push_back(run_sweep(s));
  const Peak p = peak(rep.results.back());
  rep.checks.push_back(make_check("max selectivity", p.value, 0.70, 0.03, CheckKind::abs));
  // Curves only: peak location within 20%.
  rep.checks.push_back(make_check("tau_p at max", p.at.tau_p, 1.5, 0.2, CheckKind::rel));
  rep.checks.push_back(make_check("gamma_bar at max", p.at.gamma_bar.real(), 0.75, 0.2, CheckKind::rel));
  rep.metadata["tolerance"] = "qualitative: peak location +-20%";
}

void betap_symmetry(CaseReport& rep, int workers) {
  for (double d : {0.5, 1.0, 1.5}) {
    SweepSpec s = point_spec(Engine::numeric, {4.0, 0.0, 2.0, 1.0, 0.75, 1.0}, PumpSpec::gaussian(1.0));
    s.axes = {{"beta_p", {2.0 - d, 2.0 + d}}};
    s.workers = workers;
    rep.results.push_back(run_sweep(s));
    const auto& rec = rep.results.back().records;
    if (!rec[0].ok() || !rec[1].ok()) throw NumericalError("beta_p symmetry point failed");
    std::ostringstream name;
    name << "S(beta_p=" << 2.0 + d << ") vs S(beta_p=" << 2.0 - d << ")";
    rep.checks.push_back(make_check(name.str(), rec[1].selectivity, rec[0].selectivity, 1e-3, CheckKind::abs));
  }
}

void chirp_invariance(CaseReport& rep, int) {
  const PumpSpec plain = PumpSpec::gaussian(0.1);
  const PumpSpec chirped = plain.with_chirp(Chirp{{0.0, 0.0, 50.0}});
  SweepSpec s = point_spec(Engine::analytic_ssvm, {2.0, 0.0, 0.0, 1.0, 1.0, 0.1}, plain);
  const SweepRecord a = single(rep, s);
  s.pump = chirped;
  const SweepRecord b = single(rep, s);
  rep.checks.push_back(make_check("max |rho_n(chirped) - rho_n|", (a.rho - b.rho).cwiseAbs().maxCoeff(), 0.0, 1e-6,
                                  CheckKind::abs));
  rep.metadata["chirp"] = "theta(t) = 50 t^2";
}

double rel_l2(const CVec& a, const CVec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

void ecop_limit(CaseReport& rep, int) {
  // (i) solver against the pointwise rotation at beta_r = beta_s.
  const RegimeParams p(0.5, 0.5, 0.0, 1.0, cplx(0.9, 0.4));
  const PumpSpec pump = PumpSpec::gaussian(1.0);
  const TemporalGrid grid(-14.0, 14.0, 1401, 400);
  FieldState in = FieldState::zeros(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) {
    const double t = grid.t(i);
    in.a_s[i] = std::exp(-0.5 * std::pow((t - 0.5) / 1.5, 2));
    in.a_r[i] = cplx(0.0, 0.6) * std::exp(-0.5 * std::pow((t + 1.0) / 2.0, 2));
  }
  const FieldState num = propagate(p, pump, grid, in);
  const FieldState exact = ecop_output(p, pump, grid, in);
  CVec a(2 * grid.n_t()), b(2 * grid.n_t());
  a << num.a_r, num.a_s;
  b << exact.a_r, exact.a_s;
  rep.checks.push_back(make_check("solver vs closed form (rel L2)", rel_l2(a, b), 0.0, 1e-4, CheckKind::abs));

  // (ii) direct quadrature of the velocity-matched solution as beta_rs -> 0.
  std::vector<double> ts;
  for (double t = -4.0; t <= 4.0; t += 0.25) ts.push_back(t);
  const auto rows = ssvm_to_ecop_limit_check(1.2, 1.0, pump, [](double t) { return cplx(std::exp(-t * t / 8.0)); },
                                             {1e-3}, ts);
  rep.checks.push_back(make_check("limit at beta_rs = 1e-3 (rel L2)", rows.at(0).rel_error, 0.0, 1e-2, CheckKind::abs));

  // (iii) g * integral_0^1 J0(|g| sqrt(s(1-s))) ds = 2 sin(g/2).
  for (double g : {0.5, 2.0, 10.0}) {
    std::ostringstream name;
    name << "bessel identity g=" << g;
    rep.checks.push_back(make_check(name.str(), bessel_identity_lhs(g), 2.0 * std::sin(g / 2.0), 1e-8, CheckKind::abs));
  }
}

const std::vector<CaseDef>& catalog() {
  static const std::vector<CaseDef> cases = {
      {"table1-a", "low-conversion CEs, beta=(1,-1,1), tau_p=1",
       low_ce_case(1.0, -1.0, 1.0, 1.0, false, {1.0, 0.306, 0.088, 0.037}, 0.02, CheckKind::rel, 0.646)},
      {"table1-b", "low-conversion CEs, beta=(4,2,3), tau_p=1",
       low_ce_case(4.0, 2.0, 3.0, 1.0, false, {1.0, 0.275, 0.064, 0.033}, 0.02, CheckKind::rel, 0.676)},
      {"table1-c", "low-conversion CEs, beta=(3.5,1.5,1.5), tau_p=1",
       low_ce_case(3.5, 1.5, 1.5, 1.0, false, {1.0, 0.306, 0.088, 0.037}, 0.02, CheckKind::rel, 0.646)},
      {"table1-d", "low-conversion CEs, beta=(3.5,1.5,1), tau_p=1",
       low_ce_case(3.5, 1.5, 1.0, 1.0, false, {1.0, 0.342, 0.115, 0.047}, 0.02, CheckKind::rel, 0.610)},
      // Two-significant-figure values: one unit in the last printed place.
      {"fig2", "near-separable low-conversion kernel, beta=(8,4,6), tau_p=0.707",
       low_ce_case(8.0, 4.0, 6.0, 0.707, false, {1.0, 0.029, 0.028, 0.011}, 1e-3, CheckKind::abs, 0.913)},
      {"fig3a", "short pump matched to r, beta=(1,-1,1), tau_p=0.1",
       low_ce_case(1.0, -1.0, 1.0, 0.1, false, {1.0, 0.022, 0.006, 0.003}, 1e-3, CheckKind::abs, 0.967)},
      {"fig3b", "short pump matched to s, beta=(2,0,0), tau_p=0.1",
       low_ce_case(2.0, 0.0, 0.0, 0.1, false, {1.0, 0.022, 0.006, 0.003}, 1e-3, CheckKind::abs, 0.967)},
      {"fig5", "first-order Hermite-Gauss pump, beta=(1,-1,1), tau_p=0.1",
       low_ce_case(1.0, -1.0, 1.0, 0.1, true, {1.0, 0.049, 0.007, 0.005}, 1e-3, CheckKind::abs, 0.936)},
      {"fig6", "velocity-matched selectivity versus gamma_bar, tau_p=0.1", fig6},
      {"scup-opt", "symmetric counter-propagation: best selectivity over (tau_p, gamma_bar)", scup_opt},
      {"ssvm-limit-0.85", "velocity-matched selectivity maximum at tau_p=0.01", ssvm_limit},
      {"betap-symmetry", "selectivity at beta_p = 2 -+ d (beta_s=0, beta_r=4)", betap_symmetry},
      {"chirp-invariance", "velocity-matched spectrum with and without a quadratic pump chirp", chirp_invariance},
      {"ecop-limit", "co-propagating closed form, walk-off limit and Bessel identity", ecop_limit},
  };
  return cases;
}

}  // namespace

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::rel: return "rel";
    case CheckKind::abs: return "abs";
    case CheckKind::at_least: return ">=";
    case CheckKind::at_most: return "<=";
  }
  return "?";
}

CaseCheck make_check(std::string name, double value, double expected, double tol, CheckKind kind) {
  CaseCheck c{std::move(name), value, expected, tol, kind, false};
  switch (kind) {
    case CheckKind::rel: c.passed = std::abs(value - expected) <= tol * std::abs(expected); break;
    case CheckKind::abs: c.passed = std::abs(value - expected) <= tol; break;
    case CheckKind::at_least: c.passed = value >= expected; break;
    case CheckKind::at_most: c.passed = value <= expected; break;
  }
  c.passed = c.passed && std::isfinite(value);
  return c;
}

bool CaseReport::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<std::string> case_ids() {
  std::vector<std::string> ids;
  for (const auto& c : catalog()) ids.push_back(c.id);
  return ids;
}

CaseReport reproduce(const std::string& id, int workers) {
  for (const auto& c : catalog()) {
    if (c.id != id) continue;
    CaseReport rep;
    rep.id = c.id;
    rep.description = c.description;
    const auto t0 = std::chrono::steady_clock::now();
    c.run(rep, std::max(1, workers));
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  throw ConfigError("unknown case '" + id + "'");
}

std::string format_report(const CaseReport& report) {
  std::ostringstream s;
  s << (report.passed() ? "PASS " : "FAIL ") << report.id << "  (" << report.description << ", "
    << std::fixed << std::setprecision(1) << report.wall_time_s << " s)\n";
  s << std::defaultfloat;
  for (const auto& c : report.checks) {
    s << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << std::setprecision(6) << c.value;
    switch (c.kind) {
      case CheckKind::rel: s << " vs " << c.expected << " (rel tol " << c.tol << ")"; break;
      case CheckKind::abs: s << " vs " << c.expected << " (abs tol " << c.tol << ")"; break;
      case CheckKind::at_least: s << " >= " << c.expected; break;
      case CheckKind::at_most: s << " <= " << c.expected; break;
    }
    s << "\n";
  }
  for (const auto& [k, v] : report.metadata) s << "  note " << k << ": " << v << "\n";
  return s.str();
}

std::string report_to_json_text(const CaseReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"tol", c.tol},
                      {"kind", to_string(c.kind)}, {"passed", c.passed}});
  const nlohmann::json doc = {{"id", report.id},       {"description", report.description},
                              {"passed", report.passed()}, {"checks", checks},
                              {"metadata", report.metadata}, {"wall_time_s", report.wall_time_s}};
  return doc.dump(1) + "\n";
}

}  // namespace twm
