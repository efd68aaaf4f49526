#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twm/catalog.hpp"
#include "twm/errors.hpp"
#include "twm/gf_analytic.hpp"
#include "twm/gf_numeric.hpp"
#include "twm/io.hpp"
#include "twm/schmidt.hpp"
#include "twm/sweep.hpp"

using namespace twm;

namespace {

enum Exit { kOk = 0, kToleranceFailure = 1, kConfigError = 2, kNumericalError = 3 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

int cmd_run(const std::string& config, const std::string& format, int workers, const std::string& out) {
  SweepSpec spec = load_config(config);
  if (workers > 0) spec.workers = workers;
  const SweepResult result = run_sweep(spec);
  std::ostringstream s;
  if (format == "csv")
    write_csv(result, s);
  else
    s << to_json_text(result);
  emit(s.str(), out);

  int failed = 0;
  std::string first_kind;
  for (const auto& r : result.records)
    if (!r.ok()) {
      if (failed++ == 0) first_kind = r.error_kind;
      std::cerr << "point " << r.index << ": " << r.error_kind << ": " << r.error << "\n";
    }
  if (failed > 0 && failed == static_cast<int>(result.records.size()))
    return first_kind == "config" ? kConfigError : kNumericalError;
  return kOk;
}

int cmd_reproduce(const std::string& id, const std::string& format, int workers, const std::string& out) {
  const std::vector<std::string> ids = id == "all" ? case_ids() : std::vector<std::string>{id};
  std::ostringstream s;
  nlohmann::json all = nlohmann::json::array();
  bool ok = true;
  for (const auto& c : ids) {
    const CaseReport rep = reproduce(c, workers);
    ok = ok && rep.passed();
    if (format == "json")
      all.push_back(nlohmann::json::parse(report_to_json_text(rep)));
    else
      s << format_report(rep);
    if (!out.empty() && out != "-") std::cerr << (rep.passed() ? "PASS " : "FAIL ") << c << "\n";
  }
  if (format == "json") s << all.dump(1) << "\n";
  emit(s.str(), out);
  return ok ? kOk : kToleranceFailure;
}

// Builds the Green function of a configuration's base point.
int cmd_gf(const std::string& config, const std::string& block_set, const std::string& out) {
  const SweepSpec spec = load_config(config);
  const RegimeParams p = spec.base.regime();
  const PumpSpec pump = pump_with_width(spec.pump, spec.base.tau_p);
  const bool conversion_only = block_set == "rs";
  GreenFunction gf;
  switch (spec.engine) {
    case Engine::low_ce: gf = sample_low_ce(p, pump, kernel_axes(p, pump, spec.n_t)); break;
    case Engine::analytic_ssvm: gf = sample_ssvm(p, pump, kernel_axes(p, pump, spec.n_t), conversion_only); break;
    case Engine::numeric: {
      NumericOptions o = spec.numeric;
      o.conversion_only = conversion_only;
      gf = assemble_gf(plan_numeric(p, pump, o));
      break;
    }
  }
  gf.metadata["engine"] = to_string(spec.engine);
  gf.metadata["config"] = spec_to_json_text(spec);
  if (out.empty() || out == "-") throw ConfigError("gf needs --out <path>");
  save_gf(gf, out);
  return kOk;
}

int cmd_decompose(const std::string& path, const std::string& format, int depth, const std::string& out) {
  const GreenFunction gf = load_gf(path);
  const SchmidtResult r = decompose(gf, {.n_modes = 0});
  const int n = std::min<int>(depth, static_cast<int>(r.rho.size()));
  std::ostringstream s;
  if (format == "csv") {
    s << "n,rho,ce\n" << std::setprecision(12);
    for (int k = 0; k < n; ++k) s << k + 1 << ',' << r.rho(k) << ',' << r.ce(k) << '\n';
    s << "selectivity," << r.selectivity << ",\nseparability," << r.separability << ",\n";
  } else {
    nlohmann::json j = {{"rho", std::vector<double>(r.rho.data(), r.rho.data() + n)},
                        {"ce", std::vector<double>(r.ce.data(), r.ce.data() + n)},
                        {"selectivity", r.selectivity},
                        {"separability", r.separability},
                        {"metadata", gf.metadata}};
    s << j.dump(1) << "\n";
  }
  emit(s.str(), out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-mode analysis of three-wave mixing in waveguides"};
  app.require_subcommand(1);
  std::string format = "json", out;
  int workers = 0;
  app.add_option("--format", format, "Output format: csv, json (reproduce also: text)")
      ->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--workers", workers, "Parallel workers (default: from config or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "Output path (default: stdout)");

  std::string config, case_id, gf_path, blocks = "all";
  int depth = kReportedModes;
  auto* run = app.add_subcommand("run", "Run the sweep described by a JSON config");
  run->add_option("config", config, "Config file")->required();
  auto* rep = app.add_subcommand("reproduce", "Run a built-in reproduction case (or 'all')");
  rep->add_option("case", case_id, "Case id or 'all'")->required();
  auto* dec = app.add_subcommand("decompose", "Schmidt decomposition of a stored Green function");
  dec->add_option("gf-file", gf_path, "Green-function file")->required();
  dec->add_option("--depth", depth, "Values to report")->check(CLI::PositiveNumber);
  auto* gf = app.add_subcommand("gf", "Build and store the Green function of a config's base point");
  gf->add_option("config", config, "Config file")->required();
  gf->add_option("--blocks", blocks, "all or rs")->check(CLI::IsMember({"all", "rs"}));
  auto* list = app.add_subcommand("list", "List reproduction cases");
  for (auto* sub : {run, rep, dec, gf, list}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, format == "text" ? "json" : format, workers, out);
    if (*rep) return cmd_reproduce(case_id, format == "json" ? "json" : "text", std::max(workers, 1), out);
    if (*dec) return cmd_decompose(gf_path, format == "csv" ? "csv" : "json", depth, out);
    if (*gf) return cmd_gf(config, blocks, out);
    if (*list) {
      for (const auto& id : case_ids()) std::cout << id << "\n";
      return kOk;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
