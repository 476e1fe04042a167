#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "ladder/kernels.hpp"
#include "ladder/parallel.hpp"

namespace ladder::cli {

namespace fs = std::filesystem;

namespace {

// Typed access to one JSON object with unknown-key rejection.
class Section {
 public:
  Section(const json& doc, std::string path, std::initializer_list<const char*> allowed) : path_(std::move(path)) {
    if (!doc.is_null() && !doc.is_object()) throw ConfigError(where() + " must be an object");
    if (doc.is_object()) j_ = &doc;
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    if (j_)
      for (auto it = j_->begin(); it != j_->end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + key(it.key()) + "'");
  }

  bool has(const char* k) const { return j_ && j_->contains(k); }
  const json& raw(const char* k) const {
    static const json null;
    return has(k) ? (*j_)[k] : null;
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double num(const char* k, double def) const {
    if (!has(k)) return def;
    const json& v = (*j_)[k];
    if (!v.is_number()) throw ConfigError(key(k) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key(k) + " must be finite");
    return d;
  }
  double positive(const char* k, double def) const {
    const double d = num(k, def);
    if (!(d > 0)) throw ConfigError(key(k) + " must be positive (got " + csv_number(d) + ")");
    return d;
  }
  std::size_t count(const char* k, std::size_t def) const {
    if (!has(k)) return def;
    const json& v = (*j_)[k];
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(key(k) + " must be a non-negative integer");
    return v.get<std::size_t>();
  }
  bool flag(const char* k, bool def) const {
    if (!has(k)) return def;
    if (!(*j_)[k].is_boolean()) throw ConfigError(key(k) + " must be true or false");
    return (*j_)[k].get<bool>();
  }
  std::string str(const char* k, const std::string& def, std::initializer_list<const char*> choices = {}) const {
    if (!has(k)) return def;
    if (!(*j_)[k].is_string()) throw ConfigError(key(k) + " must be a string");
    std::string s = (*j_)[k].get<std::string>();
    if (choices.size()) {
      bool found = false;
      std::string list;
      for (const char* c : choices) {
        found = found || s == c;
        list += list.empty() ? c : std::string("|") + c;
      }
      if (!found) throw ConfigError(key(k) + " must be one of " + list + " (got '" + s + "')");
    }
    return s;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json* j_ = nullptr;
  std::string path_;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

json header(const RunConfig& cfg, const char* command) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"method", cfg.method},
          {"seed", cfg.seed},
          {"simd", kernels::isa_name(kernels::active_isa())},
          {"generated_utc", utc_now()},
          {"config", cfg.echo}};
}

AmplitudeGrid gate_input(const RunConfig& cfg, const PhotonPacket& control, const PhotonPacket& target) {
  GridSpec spec = default_grid_spec(cfg.emitter, control, target, cfg.options.n1, cfg.options.n2,
                                    cfg.options.span_factor);
  return build_input_grid(control, target, spec);
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

void apply_set(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set key '" + path + "' has an empty component");
    const bool index = !part.empty() && std::all_of(part.begin(), part.end(), ::isdigit);
    json* next;
    if (index && node->is_array()) {
      const std::size_t k = std::stoul(part);
      if (k >= node->size()) throw ConfigError("--set index " + part + " out of range in '" + path + "'");
      next = &(*node)[k];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("--set path '" + path + "' descends into a non-object");
      next = &(*node)[part];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

json load_config(const std::string& path, const std::vector<std::string>& sets) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  for (const auto& s : sets) apply_set(doc, s);
  return doc;
}

BackendMethod backend_for(const std::string& m) {
  if (m == "analytic") return BackendMethod::AnalyticClosedForm;
  if (m == "exact") return BackendMethod::SMatrixQuadrature;
  if (m == "markov") return BackendMethod::MarkovApprox;
  if (m == "resonant") return BackendMethod::Resonant;
  if (m == "oracle") return BackendMethod::TimeDomainOracle;
  throw ConfigError("unknown method '" + m + "'");
}

SweepMethod sweep_method_for(const std::string& m) {
  if (m == "analytic") return SweepMethod::Analytic;
  if (m == "exact") return SweepMethod::Exact;
  if (m == "markov") return SweepMethod::Markov;
  if (m == "oracle") return SweepMethod::Oracle;
  throw ConfigError("method '" + m + "' is not available for sweeps");
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  const Section top(doc, "", {"schema_version", "emitter", "operating_point", "packets", "delta_t", "encoding",
                              "method", "grid", "tolerances", "oracle", "sweep", "composite", "output", "seed"});
  if (top.has("schema_version") && top.count("schema_version", kSchemaVersion) != kSchemaVersion)
    throw ConfigError("schema_version " + top.raw("schema_version").dump() + " is not supported");

  const Section em(top.raw("emitter"), "emitter", {"omega_c", "omega_t", "gamma_c", "gamma_t"});
  c.emitter.omega_c = em.positive("omega_c", c.emitter.omega_c);
  c.emitter.omega_t = em.positive("omega_t", c.emitter.omega_t);
  c.emitter.gamma_t = em.num("gamma_t", c.emitter.gamma_t);
  if (c.emitter.gamma_t < 0) throw ConfigError("emitter.gamma_t must be non-negative");

  if (top.has("operating_point")) {
    if (em.has("gamma_c") || top.has("packets") || top.has("delta_t"))
      throw ConfigError("operating_point conflicts with emitter.gamma_c / packets / delta_t; give one or the other");
    const Section op(top.raw("operating_point"), "operating_point",
                     {"sigma_t_over_gamma_c", "gamma_t_over_sigma_t", "ratio", "delta_t_over_gamma_t"});
    double r1 = 1e3, r2 = 1e3;
    if (op.has("ratio")) r1 = r2 = op.positive("ratio", 1e3);
    r1 = op.positive("sigma_t_over_gamma_c", r1);
    r2 = op.positive("gamma_t_over_sigma_t", r2);
    if (!(c.emitter.gamma_t > 0)) throw ConfigError("operating_point requires emitter.gamma_t > 0");
    const double sigma = c.emitter.gamma_t / r2;
    c.emitter.gamma_c = sigma / r1;
    c.packets = {c.emitter.gamma_c, sigma};
    c.delta_t = op.num("delta_t_over_gamma_t", 0.0) * c.emitter.gamma_t;
  } else {
    c.emitter.gamma_c = em.positive("gamma_c", c.emitter.gamma_c);
    const Section pk(top.raw("packets"), "packets", {"control_width", "target_width"});
    c.packets.control_width = pk.positive("control_width", c.emitter.gamma_c);
    c.packets.target_width = pk.positive("target_width", 1e-3);
    c.delta_t = top.num("delta_t", 0.0);
  }

  c.encoding = QubitEncoding::standard(c.emitter, c.delta_t);
  {
    const Section en(top.raw("encoding"), "encoding",
                     {"control_zero_offset", "control_one_offset", "target_zero_offset", "target_one_offset"});
    c.encoding.control_zero_offset = en.num("control_zero_offset", c.encoding.control_zero_offset);
    c.encoding.control_one_offset = en.num("control_one_offset", c.encoding.control_one_offset);
    c.encoding.target_zero_offset = en.num("target_zero_offset", c.encoding.target_zero_offset);
    c.encoding.target_one_offset = en.num("target_one_offset", c.encoding.target_one_offset);
  }

  c.method = top.str("method", c.method, {"analytic", "exact", "markov", "resonant", "oracle"});

  const Section gr(top.raw("grid"), "grid", {"n1", "n2", "span_factor"});
  c.options.n1 = gr.count("n1", c.options.n1);
  c.options.n2 = gr.count("n2", c.options.n2);
  if (c.options.n1 < 8 || c.options.n2 < 8) throw ConfigError("grid.n1 and grid.n2 must be at least 8");
  c.options.span_factor = gr.positive("span_factor", c.options.span_factor);

  const Section tol(top.raw("tolerances"), "tolerances",
                    {"quadrature_rel_tol", "truncation_budget", "consistency", "residual", "norm_drift", "oracle_l2",
                     "oracle_fidelity", "absorption"});
  c.options.scatter.rel_tol = tol.positive("quadrature_rel_tol", c.options.scatter.rel_tol);
  c.options.scatter.truncation_budget = tol.positive("truncation_budget", c.options.scatter.truncation_budget);
  c.options.consistency_tol = tol.positive("consistency", c.options.consistency_tol);
  c.options.arrival.residual_tolerance = tol.positive("residual", c.options.arrival.residual_tolerance);
  c.oracle.step.residual_tolerance = c.options.arrival.residual_tolerance;
  c.oracle.step.norm_tolerance = tol.positive("norm_drift", c.oracle.step.norm_tolerance);
  c.oracle.l2_tolerance = tol.positive("oracle_l2", c.oracle.l2_tolerance);
  c.oracle.fidelity_tolerance = tol.positive("oracle_fidelity", c.oracle.fidelity_tolerance);
  c.oracle.absorption_threshold = tol.positive("absorption", c.oracle.absorption_threshold);

  const Section orc(top.raw("oracle"), "oracle",
                    {"integrator", "dt", "t_start", "t_end", "max_fft", "gate_fidelity", "abs_tol", "rel_tol", "samples"});
  c.oracle.integrator = orc.str("integrator", c.oracle.integrator, {"arrival", "modes"});
  c.options.arrival.dt = orc.num("dt", 0.0);
  if (c.options.arrival.dt < 0) throw ConfigError("oracle.dt must be non-negative");
  c.options.arrival.t_start = orc.num("t_start", 0.0);
  c.options.arrival.t_end = orc.num("t_end", 0.0);
  if ((orc.has("t_start") || orc.has("t_end")) && !(c.options.arrival.t_end > c.options.arrival.t_start))
    throw ConfigError("oracle.t_start must be below oracle.t_end");
  if (orc.has("t_start") != orc.has("t_end"))
    throw ConfigError("oracle.t_start and oracle.t_end must be given together");
  c.options.arrival.max_fft = orc.count("max_fft", c.options.arrival.max_fft);
  c.oracle.gate_fidelity = orc.flag("gate_fidelity", c.oracle.gate_fidelity);
  c.oracle.step.abs_tol = orc.positive("abs_tol", c.oracle.step.abs_tol);
  c.oracle.step.rel_tol = orc.positive("rel_tol", c.oracle.step.rel_tol);
  c.oracle.step.samples = orc.count("samples", c.oracle.step.samples);
  if (c.oracle.step.samples < 2) throw ConfigError("oracle.samples must be at least 2");
  c.options.arrival.samples = c.oracle.step.samples;

  {
    const Section sw(top.raw("sweep"), "sweep", {"kind", "axes", "points", "ratio"});
    c.sweep_kind = sw.str("kind", c.sweep_kind, {"contour", "detuning", "custom"});
    const std::size_t pts = sw.count("points", c.sweep_kind == "contour" ? 20 : 81);
    const double ratio = sw.positive("ratio", 1e3);
    if (c.sweep_kind == "contour") c.sweep = fidelity_contour_spec(pts);
    else c.sweep = detuning_sweep_spec(ratio, pts);
    if (sw.has("ratio") && top.has("operating_point"))
      throw ConfigError("sweep.ratio conflicts with operating_point; give one or the other");
    if (top.has("operating_point"))
      c.sweep.baseline = {c.packets.target_width, c.emitter.gamma_c, c.emitter.gamma_t, c.delta_t};
    if (c.sweep_kind == "custom") {
      if (!sw.has("axes") || !sw.raw("axes").is_array() || sw.raw("axes").empty())
        throw ConfigError("sweep.axes must be a non-empty array for kind=custom");
      c.sweep.axes.clear();
      for (std::size_t k = 0; k < sw.raw("axes").size(); ++k) {
        const Section ax(sw.raw("axes")[k], "sweep.axes." + std::to_string(k),
                         {"parameter", "scale", "min", "max", "points"});
        SweepAxis a;
        a.parameter = ax.str("parameter", "", {"sigma_t/gamma_c", "gamma_t/sigma_t", "ratio", "delta_t/gamma_t", "gamma_t"});
        a.scale = ax.str("scale", "linear", {"linear", "log"}) == "log" ? AxisScale::Log : AxisScale::Linear;
        a.min = ax.num("min", 0.0);
        a.max = ax.num("max", 1.0);
        a.points = ax.count("points", 2);
        c.sweep.axes.push_back(a);
      }
    } else if (sw.has("axes")) {
      throw ConfigError("sweep.axes is only used with sweep.kind=custom");
    }
    for (std::size_t k = 0; k < c.sweep.axes.size(); ++k) {
      try {
        c.sweep.axes[k].validate();
      } catch (const InvalidParameter& e) {
        throw ConfigError("sweep.axes." + std::to_string(k) + ": " + e.what());
      }
    }
  }

  {
    const Section cp(top.raw("composite"), "composite",
                     {"omega_x", "omega_y", "d_x", "d_y", "separation", "epsilon_r", "axis", "coupling_scale",
                      "kappa", "j_xx", "j_yy"});
    CompositePair& p = c.pair;
    p.omega_x = cp.num("omega_x", p.omega_x);
    p.omega_y = cp.num("omega_y", p.omega_y);
    p.d_x = cp.num("d_x", p.d_x);
    p.d_y = cp.num("d_y", p.d_y);
    p.separation = cp.num("separation", p.separation);
    if (!(p.separation > 0))
      throw ConfigError("composite.separation must be positive: the dipole coupling diverges as 1/r^3 at r = 0");
    p.epsilon_r = cp.num("epsilon_r", p.epsilon_r);
    p.coupling_scale = cp.num("coupling_scale", p.coupling_scale);
    if (cp.has("axis")) {
      const json& a = cp.raw("axis");
      if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number())
        throw ConfigError("composite.axis must be an array of three numbers");
      p.axis = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    }
    if (cp.has("j_xx") != cp.has("j_yy")) throw ConfigError("composite.j_xx and composite.j_yy must be given together");
    if (cp.has("j_xx")) {
      p.direct_couplings = true;
      p.j_xx = cp.num("j_xx", 0.0);
      p.j_yy = cp.num("j_yy", 0.0);
    }
    c.kappa = cp.positive("kappa", c.kappa);
  }

  {
    const Section out(top.raw("output"), "output", {"dir"});
    c.out_dir = out.str("dir", c.out_dir);
  }
  c.seed = top.count("seed", 0);
  c.echo = doc;
  return c;
}

// ---------------------------------------------------------------------------
// file formats

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << csv_field(r[k]);
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = any = true;
    } else if (ch == ',') {
      row.push_back(field);
      field.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_gate(const RunConfig& cfg) {
  const GateReport r = gate_report(cfg.emitter, cfg.encoding, cfg.packets, backend_for(cfg.method), cfg.options);
  json doc = header(cfg, "gate");
  const char* names[4] = {"00", "01", "10", "11"};
  json ov = json::array();
  for (int b = 0; b < 4; ++b) ov.push_back({{"basis", names[b]}, {"re", r.overlaps[b].real()}, {"im", r.overlaps[b].imag()}});
  doc["result"] = {{"fidelity", r.fidelity_dominant},
                   {"fidelity_coherent", r.fidelity},
                   {"phase_rad", r.phase},
                   {"overlaps", ov},
                   {"backend", to_string(r.method)},
                   {"error_budget", r.error_budget}};
  doc["parameters"] = {{"omega_c", cfg.emitter.omega_c},
                       {"omega_t", cfg.emitter.omega_t},
                       {"gamma_c", cfg.emitter.gamma_c},
                       {"gamma_t", cfg.emitter.gamma_t},
                       {"control_width", cfg.packets.control_width},
                       {"target_width", cfg.packets.target_width},
                       {"delta_t", cfg.encoding.target_one_offset},
                       {"encoding",
                        {{"control_zero_offset", cfg.encoding.control_zero_offset},
                         {"control_one_offset", cfg.encoding.control_one_offset},
                         {"target_zero_offset", cfg.encoding.target_zero_offset},
                         {"target_one_offset", cfg.encoding.target_one_offset}}},
                       {"grid", {{"n1", cfg.options.n1}, {"n2", cfg.options.n2}, {"span_factor", cfg.options.span_factor}}}};
  const auto path = out_path(cfg, "gate.json");
  write_json(path.string(), doc);
  std::cout << "fidelity " << csv_number(r.fidelity_dominant) << "  coherent " << csv_number(r.fidelity) << "  phase "
            << csv_number(r.phase) << " rad  -> " << path.string() << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
  SweepSpec spec = cfg.sweep;
  spec.method = sweep_method_for(cfg.method);
  spec.numeric = cfg.options;
  const SweepResult res = run_sweep(spec);

  std::vector<std::string> head;
  for (const auto& a : res.axes) head.push_back(a.parameter);
  for (const char* h : {"fidelity", "fidelity_coherent", "phase_rad", "phase_unwrapped_rad", "o00_re", "o00_im",
                        "o01_re", "o01_im", "o10_re", "o10_im", "o11_re", "o11_im", "error_estimate", "status", "error"})
    head.push_back(h);
  std::vector<std::vector<std::string>> rows;
  std::size_t failed = 0;
  for (const auto& p : res.points) {
    std::vector<std::string> r;
    for (double x : p.coords) r.push_back(csv_number(x));
    for (double x : {p.fidelity, p.fidelity_coherent, p.phase, p.phase_unwrapped}) r.push_back(csv_number(x));
    for (const auto& z : p.overlaps) {
      r.push_back(csv_number(z.real()));
      r.push_back(csv_number(z.imag()));
    }
    r.push_back(csv_number(p.error_estimate));
    r.push_back(p.ok ? "ok" : "failed");
    r.push_back(p.error);
    failed += !p.ok;
    rows.push_back(std::move(r));
  }
  const auto csv = out_path(cfg, "sweep.csv");
  write_csv(csv.string(), head, rows);

  json meta = header(cfg, "sweep");
  json axes = json::array();
  for (std::size_t k = 0; k < res.axes.size(); ++k)
    axes.push_back({{"parameter", res.axes[k].parameter},
                    {"scale", res.axes[k].scale == AxisScale::Log ? "log" : "linear"},
                    {"min", res.axes[k].min},
                    {"max", res.axes[k].max},
                    {"points", res.axes[k].points}});
  meta["sweep"] = {{"kind", cfg.sweep_kind},
                   {"axes", axes},
                   {"baseline",
                    {{"sigma_t", spec.baseline.sigma_t},
                     {"gamma_c", spec.baseline.gamma_c},
                     {"gamma_t", spec.baseline.gamma_t},
                     {"delta_t", spec.baseline.delta_t}}},
                   {"points", res.points.size()},
                   {"failed_points", failed},
                   {"started_utc", res.started},
                   {"finished_utc", res.finished},
                   {"table", csv.filename().string()},
                   {"columns",
                    {{"fidelity", "dominant-term fidelity 3/4 + |o11|/4 (dimensionless)"},
                     {"fidelity_coherent", "four-term average (dimensionless)"},
                     {"phase_rad", "principal conditional phase (rad)"},
                     {"phase_unwrapped_rad", "lag-branch phase, continuous along the last axis (rad)"},
                     {"oXY_re/oXY_im", "basis overlaps (dimensionless)"},
                     {"error_estimate", "backend error budget (dimensionless)"}}}};
  write_json(out_path(cfg, "sweep.json").string(), meta);
  std::cout << res.points.size() << " points (" << failed << " failed) -> " << csv.string() << "\n";
  return kOk;
}

int cmd_oracle_check(const RunConfig& cfg) {
  json doc = header(cfg, "oracle-check");
  const EmitterParams& e = cfg.emitter;
  const PhotonPacket control{e.omega_c + cfg.encoding.control_one_offset, cfg.packets.control_width};
  const PhotonPacket target{e.omega_t + cfg.encoding.target_one_offset, cfg.packets.target_width};
  const AmplitudeGrid in = gate_input(cfg, control, target);

  std::vector<double> times, pf, pe1, pe2;
  AmplitudeGrid out;
  double drift = 0, rg = 0, rs = 0;
  if (cfg.oracle.integrator == "arrival") {
    ArrivalOptions ao = cfg.options.arrival;
    ao.check_residuals = !(e.gamma_t == 0);
    const ArrivalResult a = evolve_arrival(in, e, ao);
    times = a.times;
    pf = a.p_field;
    pe1 = a.p_e1;
    pe2 = a.p_e2;
    out = a.output;
    drift = a.max_norm_drift;
    rg = a.residual_g;
    rs = a.residual_s;
    doc["integrator"] = {{"kind", "arrival"}, {"dt", a.dt}, {"steps", a.steps}, {"rank", a.rank},
                         {"t_start", a.t_start}, {"t_end", a.t_end}};
  } else {
    TimeWindow w{cfg.options.arrival.t_start, cfg.options.arrival.t_end};
    if (w.t_start == 0 && w.t_end == 0) w = default_time_window(in, e);
    const SystemTrajectory tr = evolve(in, e, w.t_start, w.t_end, cfg.oracle.step);
    times = tr.times;
    pf = tr.p_field;
    pe1 = tr.p_e1;
    pe2 = tr.p_e2;
    drift = tr.max_norm_drift;
    rg = std::sqrt(pe1.back());
    rs = std::abs(tr.s_values.back());
    if (e.gamma_t > 0) out = extract_output(tr, cfg.oracle.step.residual_tolerance);
    doc["integrator"] = {{"kind", "modes"}, {"rhs_evaluations", tr.rhs_evaluations}, {"t_start", w.t_start},
                         {"t_end", w.t_end}};
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < times.size(); ++k)
      rows.push_back({csv_number(times[k]), csv_number(pf[k]), csv_number(pe1[k]), csv_number(pe2[k])});
    write_csv(out_path(cfg, "oracle_trace.csv").string(), {"t", "p_field", "p_e1", "p_e2"}, rows);
  }

  bool pass = drift <= cfg.oracle.step.norm_tolerance;
  json res = {{"norm_drift", drift}, {"residual_g", rg}, {"residual_s", rs}};
  if (e.gamma_t == 0) {
    // target transition off: report how much of the control photon is absorbed
    double peak = 0;
    for (double p : pe1) peak = std::max(peak, p);
    res["mode"] = "absorption";
    res["peak_excited_population"] = peak;
    res["threshold"] = cfg.oracle.absorption_threshold;
    pass = pass && peak >= cfg.oracle.absorption_threshold;
  } else {
    ScatterDiagnostics d;
    const AmplitudeGrid ref = scatter_exact(in, e, cfg.options.scatter, &d);
    const double l2 = out.distance(ref);
    res["mode"] = "equivalence";
    res["l2_distance"] = l2;
    res["l2_tolerance"] = cfg.oracle.l2_tolerance;
    res["overlap"] = std::abs(ref.inner(out)) / std::sqrt(ref.norm2() * out.norm2());
    res["norm_in"] = in.norm2();
    res["norm_exact"] = ref.norm2();
    res["norm_oracle"] = out.norm2();
    pass = pass && l2 <= cfg.oracle.l2_tolerance;
    if (cfg.oracle.gate_fidelity) {
      GateOptions go = cfg.options;
      const GateReport fx = gate_report(e, cfg.encoding, cfg.packets, BackendMethod::SMatrixQuadrature, go);
      const GateReport fo = gate_report(e, cfg.encoding, cfg.packets, BackendMethod::TimeDomainOracle, go);
      res["fidelity_exact"] = fx.fidelity_dominant;
      res["fidelity_oracle"] = fo.fidelity_dominant;
      res["fidelity_difference"] = std::abs(fx.fidelity_dominant - fo.fidelity_dominant);
      res["fidelity_tolerance"] = cfg.oracle.fidelity_tolerance;
      pass = pass && std::abs(fx.fidelity_dominant - fo.fidelity_dominant) <= cfg.oracle.fidelity_tolerance;
    }
  }
  res["pass"] = pass;
  doc["result"] = res;
  const auto path = out_path(cfg, "oracle_check.json");
  write_json(path.string(), doc);
  std::cout << (pass ? "PASS" : "FAIL") << " " << res.dump() << "\n";
  if (!pass) {
    std::cerr << "oracle-check: comparison outside tolerance\n";
    return kNumericalError;
  }
  return kOk;
}

int cmd_composite(const RunConfig& cfg) {
  const EigenTable t = eigensystem(cfg.pair);
  const auto dips = transition_dipoles(t, cfg.pair);
  const EffectiveLadder L = effective_ladder(cfg.pair, cfg.kappa);
  json doc = header(cfg, "composite");
  json states = json::array();
  std::vector<std::vector<std::string>> erows, drows;
  const auto& basis = product_basis_labels();
  for (const auto& s : t.entries) {
    json vec = json::object();
    for (std::size_t k = 0; k < kCompositeDim; ++k)
      if (s.vector[k] != 0) vec[basis[k]] = s.vector[k];
    states.push_back({{"label", s.label}, {"energy", s.energy}, {"symmetric", s.symmetric},
                      {"excitations", s.excitations}, {"vector", vec}});
    erows.push_back({s.label, csv_number(s.energy), s.symmetric ? "S" : "A", std::to_string(s.excitations)});
  }
  json dj = json::array();
  for (const auto& d : dips) {
    dj.push_back({{"initial", d.initial}, {"final", d.final_state}, {"d", {d.d[0], d.d[1], d.d[2]}}});
    drows.push_back({d.initial, d.final_state, csv_number(d.d[0]), csv_number(d.d[1]), csv_number(d.d[2])});
  }
  doc["couplings"] = {{"j_xx", dipole_coupling(cfg.pair, DipoleAxis::X, DipoleAxis::X)},
                      {"j_yy", dipole_coupling(cfg.pair, DipoleAxis::Y, DipoleAxis::Y)},
                      {"j_xy", dipole_coupling(cfg.pair, DipoleAxis::X, DipoleAxis::Y)}};
  doc["eigenstates"] = states;
  doc["dipoles"] = dj;
  doc["effective_ladder"] = {{"omega_c", L.emitter.omega_c},   {"omega_t", L.emitter.omega_t},
                             {"gamma_c", L.emitter.gamma_c},   {"gamma_t", L.emitter.gamma_t},
                             {"gamma_g_ys", L.gamma_g_ys},     {"gamma_ys_xys", L.gamma_ys_xys},
                             {"branching_ratio", L.branching_ratio}, {"warning", L.warning ? L.message : ""}};
  write_csv(out_path(cfg, "composite_eigen.csv").string(), {"label", "energy", "symmetry", "excitations"}, erows);
  write_csv(out_path(cfg, "composite_dipoles.csv").string(), {"initial", "final", "d_x", "d_y", "d_z"}, drows);
  write_json(out_path(cfg, "composite.json").string(), doc);
  if (L.warning) std::cerr << "warning: " << L.message << "\n";
  std::cout << "composite: omega_c " << csv_number(L.emitter.omega_c) << " omega_t " << csv_number(L.emitter.omega_t)
            << " gamma_c " << csv_number(L.emitter.gamma_c) << " gamma_t " << csv_number(L.emitter.gamma_t) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Ladder-emitter controlled-phase gate simulator"};
  app.require_subcommand(1);
  std::string config_path, out_dir, method;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--set", sets, "override KEY=VALUE (dotted keys)")->take_all();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--method", method, "backend")->check(CLI::IsMember({"analytic", "exact", "markov", "oracle"}));
    sub->add_option("--seed", seed, "reserved; all methods are deterministic");
  };
  CLI::App* gate = app.add_subcommand("gate", "gate report for one operating point");
  CLI::App* sweep = app.add_subcommand("sweep", "fidelity / phase sweep");
  CLI::App* oracle = app.add_subcommand("oracle-check", "time-domain vs S-matrix cross-check");
  CLI::App* comp = app.add_subcommand("composite", "dipole-coupled composite emitter tables");
  for (auto* s : {gate, sweep, oracle, comp}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    json doc = load_config(config_path, sets);
    cfg = parse_config(doc);
    if (!method.empty()) cfg.method = method;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (app.got_subcommand(oracle)) cfg.method = "oracle";
    cfg.seed = seed ? seed : cfg.seed;
    if (app.got_subcommand(sweep)) sweep_method_for(cfg.method);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  const char* stage = app.got_subcommand(gate)     ? "gate"
                      : app.got_subcommand(sweep)  ? "sweep"
                      : app.got_subcommand(oracle) ? "oracle-check"
                                                   : "composite";
  try {
    if (app.got_subcommand(gate)) return cmd_gate(cfg);
    if (app.got_subcommand(sweep)) return cmd_sweep(cfg);
    if (app.got_subcommand(oracle)) return cmd_oracle_check(cfg);
    return cmd_composite(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error (" << stage << "): " << e.what() << "\n";
    return kConfigError;
  } catch (const IncompleteScattering& e) {
    std::cerr << "numerical error (" << stage << "): " << e.what() << " [residual |g| = " << e.residual_g
              << ", |s| = " << e.residual_s << "]\n";
    return kNumericalError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error (" << stage << "): " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace ladder::cli
