#include "twm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "twm/errors.hpp"

namespace twm {

using nlohmann::json;

namespace {

// ---- small JSON helpers -------------------------------------------------

double num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }
Vec vec_from(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = num(j[i]);
  return v;
}

json axis_json(const Axis& a) { return {{"start", a.start}, {"step", a.step}, {"size", a.size}}; }
Axis axis_from(const json& j) { return {j.at("start").get<double>(), j.at("step").get<double>(), j.at("size").get<int>()}; }

json cmat_json(const CMat& m) {
  std::vector<double> re(m.size()), im(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    re[i] = m.data()[i].real();
    im[i] = m.data()[i].imag();
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};  // column-major
}
CMat cmat_from(const json& j) {
  CMat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != static_cast<std::size_t>(m.size()) || im.size() != re.size())
    throw DataError("matrix payload does not match its dimensions");
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {re[i].get<double>(), im[i].get<double>()};
  return m;
}

json params_json(const PointParams& p) {
  return {{"beta_r", p.beta_r}, {"beta_s", p.beta_s}, {"beta_p", p.beta_p}, {"length", p.length},
          {"gamma_bar", {p.gamma_bar.real(), p.gamma_bar.imag()}}, {"tau_p", p.tau_p}};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

cplx complex_from(const json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  return j.get<double>();
}

PointParams params_from(const json& j, const std::string& where) {
  check_keys(j, {"beta_r", "beta_s", "beta_p", "length", "gamma_bar", "tau_p"}, where);
  PointParams p;
  p.beta_r = j.at("beta_r").get<double>();
  p.beta_s = j.at("beta_s").get<double>();
  p.beta_p = j.at("beta_p").get<double>();
  p.length = j.value("length", 1.0);
  p.gamma_bar = j.contains("gamma_bar") ? complex_from(j.at("gamma_bar")) : cplx(0.0);
  p.tau_p = j.value("tau_p", 1.0);
  return p;
}

std::string g12(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// ---- binary helpers -------------------------------------------------------

void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_f64(std::istream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), sizeof bits);
  if (!in) throw DataError("truncated Green-function payload");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

std::string f17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

// ---- sweep results ----------------------------------------------------------

void write_csv(const SweepResult& result, std::ostream& out) {
  const int n = result.ce_depth;
  out << "beta_r,beta_s,beta_p,length,gamma_bar_re,gamma_bar_im,tau_p";
  for (int k = 1; k <= n; ++k) out << ",rho_" << k;
  for (int k = 1; k <= n; ++k) out << ",ce_" << k;
  out << ",selectivity,separability,error\n";
  for (const auto& r : result.records) {
    const auto& p = r.params;
    out << g12(p.beta_r) << ',' << g12(p.beta_s) << ',' << g12(p.beta_p) << ',' << g12(p.length) << ','
        << g12(p.gamma_bar.real()) << ',' << g12(p.gamma_bar.imag()) << ',' << g12(p.tau_p);
    for (const Vec* v : {&r.rho, &r.ce})
      for (int k = 0; k < n; ++k) out << ',' << (k < v->size() ? g12((*v)(k)) : "");
    out << ',' << g12(r.selectivity) << ',' << g12(r.separability) << ','
        << (r.ok() ? "" : csv_quote(r.error_kind + ": " + r.error)) << '\n';
  }
}

std::string to_json_text(const SweepResult& result) {
  json records = json::array();
  for (const auto& r : result.records) {
    json j = {{"index", r.index},
              {"coords", r.coords},
              {"params", params_json(r.params)},
              {"rho", vec_json(r.rho)},
              {"ce", vec_json(r.ce)},
              {"selectivity", r.selectivity},
              {"separability", r.separability},
              {"fidelity", vec_json(r.fidelity)}};
    if (r.modes)
      j["modes"] = {{"axis_in", axis_json(r.modes->axis_in)},
                    {"axis_out", axis_json(r.modes->axis_out)},
                    {"in", cmat_json(r.modes->in)},
                    {"out", cmat_json(r.modes->out)}};
    if (!r.ok()) j["error"] = {{"kind", r.error_kind}, {"message", r.error}};
    records.push_back(std::move(j));
  }
  const auto& pv = result.provenance;
  json prov = {{"engine", pv.engine}, {"version", pv.version}, {"resolution", pv.resolution},
               {"wall_time_s", pv.wall_time_s}};
  if (!pv.config.empty()) prov["config"] = json::parse(pv.config);
  const json doc = {{"axes", result.axis_names}, {"ce_depth", result.ce_depth}, {"records", records},
                    {"provenance", prov}};
  return doc.dump(1) + "\n";
}

SweepResult sweep_result_from_json_text(const std::string& text) {
  try {
    const json doc = json::parse(text);
    SweepResult out;
    out.axis_names = doc.at("axes").get<std::vector<std::string>>();
    out.ce_depth = doc.at("ce_depth").get<int>();
    for (const auto& j : doc.at("records")) {
      SweepRecord r;
      r.index = j.at("index").get<int>();
      for (const auto& c : j.at("coords")) r.coords.push_back(num(c));
      r.params = params_from(j.at("params"), "params");
      r.rho = vec_from(j.at("rho"));
      r.ce = vec_from(j.at("ce"));
      r.selectivity = num(j.at("selectivity"));
      r.separability = num(j.at("separability"));
      r.fidelity = vec_from(j.at("fidelity"));
      if (j.contains("modes")) {
        const auto& m = j["modes"];
        r.modes = ModeData{axis_from(m.at("axis_in")), axis_from(m.at("axis_out")), cmat_from(m.at("in")),
                           cmat_from(m.at("out"))};
      }
      if (j.contains("error")) {
        r.error_kind = j["error"].at("kind").get<std::string>();
        r.error = j["error"].at("message").get<std::string>();
      }
      out.records.push_back(std::move(r));
    }
    const auto& pv = doc.at("provenance");
    out.provenance.engine = pv.at("engine").get<std::string>();
    out.provenance.version = pv.at("version").get<std::string>();
    out.provenance.resolution = pv.at("resolution").get<std::string>();
    out.provenance.wall_time_s = pv.at("wall_time_s").get<double>();
    if (pv.contains("config")) out.provenance.config = pv["config"].dump();
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed sweep result: ") + e.what());
  }
}

void export_result(const SweepResult& result, const std::string& format, const std::string& path) {
  if (format != "csv" && format != "json") throw ConfigError("unknown export format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  if (format == "csv")
    write_csv(result, out);
  else
    out << to_json_text(result);
  if (!out) throw Error("write to '" + path + "' failed");
}

// ---- configuration ---------------------------------------------------------

SweepSpec spec_from_json_text(const std::string& text) {
  try {
    const json doc = json::parse(text, nullptr, true, true);  // comments allowed
    check_keys(doc, {"params", "pump", "engine", "grid", "numeric", "axes", "outputs", "workers"}, "config");
    SweepSpec spec;
    spec.base = params_from(doc.at("params"), "params");

    const json pump = doc.value("pump", json::object());
    check_keys(pump, {"shape", "tau_p", "center", "chirp", "times", "amplitudes"}, "pump");
    const PumpShape shape = pump_shape_from_string(pump.value("shape", "gaussian"));
    const double center = pump.value("center", 0.0);
    if (pump.contains("tau_p")) spec.base.tau_p = pump["tau_p"].get<double>();
    if (shape == PumpShape::tabulated) {
      spec.pump = PumpSpec::tabulated(pump.at("times").get<std::vector<double>>(),
                                      pump.at("amplitudes").get<std::vector<double>>());
      if (!pump.contains("tau_p")) spec.base.tau_p = spec.pump.tau_p();
    } else {
      if (pump.contains("times") || pump.contains("amplitudes"))
        throw ConfigError("times/amplitudes only apply to a custom-tabulated pump");
      spec.pump = shape == PumpShape::gaussian ? PumpSpec::gaussian(spec.base.tau_p, center)
                                               : PumpSpec::hermite_gauss_1(spec.base.tau_p, center);
    }
    if (pump.contains("chirp")) spec.pump = spec.pump.with_chirp({pump["chirp"].get<std::vector<double>>()});

    spec.engine = engine_from_string(doc.value("engine", "low-ce"));
    if (doc.contains("grid")) {
      check_keys(doc["grid"], {"n_t"}, "grid");
      spec.n_t = doc["grid"].value("n_t", spec.n_t);
    }
    if (doc.contains("numeric")) {
      const auto& n = doc["numeric"];
      check_keys(n, {"n_r", "n_s", "width_r", "width_s", "edge", "dt_factor", "tol_leak", "workers"}, "numeric");
      auto& o = spec.numeric;
      o.n_r = n.value("n_r", o.n_r);
      o.n_s = n.value("n_s", o.n_s);
      o.width_r = n.value("width_r", o.width_r);
      o.width_s = n.value("width_s", o.width_s);
      o.edge = n.value("edge", o.edge);
      o.dt_factor = n.value("dt_factor", o.dt_factor);
      o.tol_leak = n.value("tol_leak", o.tol_leak);
      o.workers = n.value("workers", o.workers);
    }
    for (const auto& a : doc.value("axes", json::array())) {
      check_keys(a, {"name", "values", "start", "stop", "count"}, "axis");
      SweepAxis axis{a.at("name").get<std::string>(), {}};
      if (a.contains("values")) {
        axis.values = a["values"].get<std::vector<double>>();
      } else {
        const double lo = a.at("start").get<double>(), hi = a.at("stop").get<double>();
        const int count = a.at("count").get<int>();
        if (count < 1) throw ConfigError("axis count must be positive");
        for (int i = 0; i < count; ++i) axis.values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      }
      spec.axes.push_back(std::move(axis));
    }
    if (doc.contains("outputs")) {
      const auto& o = doc["outputs"];
      check_keys(o, {"ce_depth", "modes", "fidelity"}, "outputs");
      spec.ce_depth = o.value("ce_depth", spec.ce_depth);
      spec.modes = o.value("modes", spec.modes);
      spec.fidelity_depth = o.value("fidelity", spec.fidelity_depth);
    }
    spec.workers = doc.value("workers", spec.workers);
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration: ") + e.what());
  }
}

std::string spec_to_json_text(const SweepSpec& spec) {
  json pump = {{"shape", to_string(spec.pump.shape())}, {"center", spec.pump.center()}};
  if (spec.pump.shape() == PumpShape::tabulated) {
    pump["times"] = spec.pump.table_times();
    pump["amplitudes"] = spec.pump.table_amplitudes();
  }
  if (spec.pump.chirped()) pump["chirp"] = spec.pump.chirp().coeffs;
  json axes = json::array();
  for (const auto& a : spec.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  const auto& o = spec.numeric;
  const json doc = {
      {"params", params_json(spec.base)},
      {"pump", pump},
      {"engine", to_string(spec.engine)},
      {"grid", {{"n_t", spec.n_t}}},
      {"numeric",
       {{"n_r", o.n_r}, {"n_s", o.n_s}, {"width_r", o.width_r}, {"width_s", o.width_s}, {"edge", o.edge},
        {"dt_factor", o.dt_factor}, {"tol_leak", o.tol_leak}, {"workers", o.workers}}},
      {"axes", axes},
      {"outputs", {{"ce_depth", spec.ce_depth}, {"modes", spec.modes}, {"fidelity", spec.fidelity_depth}}},
      {"workers", spec.workers}};
  return doc.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepSpec load_config(const std::string& path) { return spec_from_json_text(read_file(path)); }

// ---- Green-function container ---------------------------------------------

void save_gf(const GreenFunction& gf, std::ostream& out) {
  gf.validate();
  auto axis = [](const Axis& a) { return f17(a.start) + " " + f17(a.step) + " " + std::to_string(a.size); };
  auto basis = [](const BasisSpec& b) { return std::to_string(b.size) + " " + f17(b.width) + " " + f17(b.center); };
  out << "twm-green-function\n";
  out << "format_version=" << kGfFormatVersion << "\n";
  out << "form=" << (gf.form == GfForm::grid ? "grid" : "basis") << "\n";
  out << "payload=float64-le re,im row-major\n";
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss})
    if (gf.has(b)) out << "block." << to_string(b) << "=" << gf.block(b).rows() << " " << gf.block(b).cols() << "\n";
  for (char c : {'r', 's'}) {
    out << "axis.in_" << c << "=" << axis(gf.in_axis(c)) << "\n";
    out << "axis.out_" << c << "=" << axis(gf.out_axis(c)) << "\n";
    out << "basis.in_" << c << "=" << basis(gf.in_basis(c)) << "\n";
    out << "basis.out_" << c << "=" << basis(gf.out_basis(c)) << "\n";
  }
  for (const auto& [name, d] : {std::pair{"rr", gf.rr_delta}, std::pair{"ss", gf.ss_delta}})
    if (d) out << "delta." << name << "=" << f17(d->delay) << " " << f17(d->weight.real()) << " " << f17(d->weight.imag()) << "\n";
  for (const auto& [k, v] : gf.metadata) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw DataError("metadata '" + k + "' cannot be stored in a header line");
    out << "meta." << k << "=" << v << "\n";
  }
  out << "end\n";
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss}) {
    const CMat& m = gf.block(b);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        put_f64(out, m(i, j).real());
        put_f64(out, m(i, j).imag());
      }
  }
  if (!out) throw Error("failed to write Green function");
}

GreenFunction load_gf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "twm-green-function") throw DataError("not a Green-function file");
  GreenFunction gf;
  std::map<Block, std::pair<Eigen::Index, Eigen::Index>> dims;
  bool version_seen = false;
  auto fields = [](const std::string& v) {
    std::istringstream s(v);
    std::vector<std::string> f;
    for (std::string x; s >> x;) f.push_back(x);
    return f;
  };
  try {
    while (true) {
      if (!std::getline(in, line)) throw DataError("Green-function header has no end line");
      if (line == "end") break;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DataError("bad header line '" + line + "'");
      const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      const auto f = fields(val);
      if (key == "format_version") {
        if (std::stoi(val) != kGfFormatVersion)
          throw DataError("unsupported Green-function format version " + val);
        version_seen = true;
      } else if (key == "form") {
        if (val != "grid" && val != "basis") throw DataError("unknown form '" + val + "'");
        gf.form = val == "grid" ? GfForm::grid : GfForm::basis;
      } else if (key == "payload") {
      } else if (key.rfind("block.", 0) == 0) {
        dims[block_from_string(key.substr(6))] = {std::stol(f.at(0)), std::stol(f.at(1))};
      } else if (key.rfind("axis.", 0) == 0) {
        const std::string n = key.substr(5);
        Axis a{std::stod(f.at(0)), std::stod(f.at(1)), std::stoi(f.at(2))};
        if (n == "in_r") gf.in_r = a;
        else if (n == "in_s") gf.in_s = a;
        else if (n == "out_r") gf.out_r = a;
        else if (n == "out_s") gf.out_s = a;
        else throw DataError("unknown axis '" + n + "'");
      } else if (key.rfind("basis.", 0) == 0) {
        const std::string n = key.substr(6);
        BasisSpec b{std::stoi(f.at(0)), std::stod(f.at(1)), std::stod(f.at(2))};
        if (n == "in_r") gf.basis_in_r = b;
        else if (n == "in_s") gf.basis_in_s = b;
        else if (n == "out_r") gf.basis_out_r = b;
        else if (n == "out_s") gf.basis_out_s = b;
        else throw DataError("unknown basis '" + n + "'");
      } else if (key == "delta.rr" || key == "delta.ss") {
        SingularPart d{std::stod(f.at(0)), {std::stod(f.at(1)), std::stod(f.at(2))}};
        (key == "delta.rr" ? gf.rr_delta : gf.ss_delta) = d;
      } else if (key.rfind("meta.", 0) == 0) {
        gf.metadata[key.substr(5)] = val;
      } else {
        throw DataError("unknown header key '" + key + "'");
      }
    }
  } catch (const std::logic_error& e) {  // stoi/stod/at failures
    throw DataError(std::string("malformed Green-function header: ") + e.what());
  }
  if (!version_seen) throw DataError("Green-function header lacks format_version");
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss}) {
    if (!dims.count(b)) continue;
    const auto [rows, cols] = dims[b];
    if (rows < 0 || cols < 0) throw DataError("negative block size");
    CMat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double re = get_f64(in);
        m(i, j) = {re, get_f64(in)};
      }
    gf.block(b) = std::move(m);
  }
  gf.validate();
  return gf;
}

void save_gf(const GreenFunction& gf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_gf(gf, out);
}

GreenFunction load_gf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_gf(in);
}

}  // namespace twm
