#include "stt/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stt/error.hpp"

namespace stt {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::Parse, msg); }

json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(what + ": " + e.what());  // nlohmann reports line/column
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing field '" + key + "'");
  return *it;
}

double as_num(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

double num_field(const json& j, const char* key, const std::string& where) {
  return as_num(need(j, key, where), where + "." + key);
}

bool bool_field(const json& j, const char* key, const std::string& where, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) bad(where + "." + key + ": expected a boolean");
  return it->get<bool>();
}

std::vector<double> num_array(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected a non-empty array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(as_num(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

Box box_field(const json& j, const char* key, const std::string& where) {
  const std::string w = where + "." + key;
  const json& b = need(j, key, where);
  if (!b.is_object()) bad(w + ": expected an object with 'lower'/'upper' arrays");
  Box out;
  out.lower = num_array(need(b, "lower", w), w + ".lower");
  out.upper = num_array(need(b, "upper", w), w + ".upper");
  if (out.lower.size() != out.upper.size()) bad(w + ": lower/upper length mismatch");
  return out;
}

std::vector<std::vector<double>> poly_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected one coefficient array per dimension");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(num_array(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json box_json(const Box& b) { return json{{"lower", b.lower}, {"upper", b.upper}}; }

TRasTask task_from(const json& j, const std::string& name) {
  if (!j.is_object()) bad("task: document must be a JSON object");
  TRasTask t;
  if (auto it = j.find("name"); it != j.end() && it->is_string())
    t.name = it->get<std::string>();
  else
    t.name = name;
  t.workspace = box_field(j, "workspace", "task");
  t.initial = box_field(j, "initial", "task");
  t.target = box_field(j, "target", "task");
  t.dimension = t.workspace.dim();
  t.horizon = num_field(j, "horizon", "task");
  const json& mw = need(j, "min_width", "task");
  if (mw.is_number())
    t.min_width.assign(t.dimension, mw.get<double>());
  else
    t.min_width = num_array(mw, "task.min_width");
  if (auto it = j.find("unsafe"); it != j.end()) {
    if (!it->is_array()) bad("task.unsafe: expected an array of pieces");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string w = "task.unsafe[" + std::to_string(i) + "]";
      const json& p = (*it)[i];
      if (!p.is_object()) bad(w + ": expected an object");
      auto active = num_array(need(p, "active", w), w + ".active");
      if (active.size() != 2) bad(w + ".active: expected [t_a, t_b]");
      TimedRegion r;
      r.active_lo = active[0];
      r.active_hi = active[1];
      r.lower_poly = poly_list(need(p, "lower_poly", w), w + ".lower_poly");
      r.upper_poly = poly_list(need(p, "upper_poly", w), w + ".upper_poly");
      t.unsafe.pieces.push_back(std::move(r));
    }
  }
  require_valid(t);
  return t;
}

std::vector<double> stage_values(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (v.is_number()) return {v.get<double>()};
  return num_array(v, where + "." + key);
}

SynthesisConfig synthesis_from(const json& j) {
  SynthesisConfig c;
  if (auto it = j.find("epsilon"); it != j.end()) c.epsilon = as_num(*it, "synthesis.epsilon");
  if (auto it = j.find("degree"); it != j.end()) {
    if (!it->is_number_integer()) bad("synthesis.degree: expected an integer");
    c.degree = it->get<int>();
  }
  if (auto it = j.find("strategy"); it != j.end()) {
    if (!it->is_string()) bad("synthesis.strategy: expected a string");
    c.strategy = parse_strategy(it->get<std::string>());
  }
  if (auto it = j.find("budget"); it != j.end()) {
    const json& b = *it;
    if (!b.is_object()) bad("synthesis.budget: expected an object");
    if (b.contains("max_nodes"))
      c.budget.max_nodes = std::size_t(as_num(b["max_nodes"], "synthesis.budget.max_nodes"));
    if (b.contains("max_lp_solves"))
      c.budget.max_lp_solves =
          std::size_t(as_num(b["max_lp_solves"], "synthesis.budget.max_lp_solves"));
    if (b.contains("max_improve_rounds"))
      c.budget.max_improve_rounds =
          std::size_t(as_num(b["max_improve_rounds"], "synthesis.budget.max_improve_rounds"));
    if (b.contains("wall_seconds"))
      c.budget.wall_seconds = as_num(b["wall_seconds"], "synthesis.budget.wall_seconds");
    c.budget.polish = bool_field(b, "polish", "synthesis.budget", c.budget.polish);
  }
  return c;
}

ControllerConfig controller_from(const json& j) {
  ControllerConfig c;
  if (auto it = j.find("stage1_gain"); it != j.end())
    c.stage1_gain = as_num(*it, "controller.stage1_gain");
  if (auto it = j.find("delta"); it != j.end()) c.delta = as_num(*it, "controller.delta");
  if (auto it = j.find("xi_mode"); it != j.end()) {
    if (!it->is_string()) bad("controller.xi_mode: expected a string");
    const std::string m = it->get<std::string>();
    if (m == "scalar")
      c.xi_mode = XiDenominator::Scalar;
    else if (m == "componentwise")
      c.xi_mode = XiDenominator::Componentwise;
    else
      bad("controller.xi_mode: 'scalar' or 'componentwise', got '" + m + "'");
  }
  if (auto it = j.find("stages"); it != j.end()) {
    if (!it->is_array()) bad("controller.stages: expected an array");
    c.auto_stages = false;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string w = "controller.stages[" + std::to_string(k) + "]";
      const json& s = (*it)[k];
      if (!s.is_object()) bad(w + ": expected an object");
      StageConfig sc;
      sc.p = stage_values(s, "p", w);
      sc.q = stage_values(s, "q", w);
      sc.mu = stage_values(s, "mu", w);
      if (s.contains("gain")) sc.gain = as_num(s["gain"], w + ".gain");
      c.stages.push_back(std::move(sc));
    }
  }
  return c;
}

SimulationConfig simulation_from(const json& j) {
  SimulationConfig c;
  if (auto it = j.find("plant"); it != j.end()) {
    if (!it->is_string()) bad("simulation.plant: expected a string");
    c.plant = it->get<std::string>();
  }
  if (auto it = j.find("x0"); it != j.end()) c.x0 = num_array(*it, "simulation.x0");
  if (auto it = j.find("dt"); it != j.end()) c.dt = as_num(*it, "simulation.dt");
  if (auto it = j.find("wbar"); it != j.end()) c.wbar = as_num(*it, "simulation.wbar");
  return c;
}

// Expand a per-stage scalar/vector to the plant dimension.
std::vector<double> broadcast(const std::vector<double>& v, std::size_t dim,
                              const std::string& what) {
  if (v.size() == dim) return v;
  if (v.size() == 1) return std::vector<double>(dim, v[0]);
  throw Error(Errc::Argument,
              what + ": expected 1 or " + std::to_string(dim) + " values, got " +
                  std::to_string(v.size()));
}

json finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(Errc::Numerical, std::string(what) + " is not finite");
  return v;
}

}  // namespace

// --------------------------------------------------------------------- tasks

TRasTask parse_task(const std::string& text, const std::string& name) {
  return task_from(parse_text(text, "task"), name);
}

std::string task_json(const TRasTask& task) {
  json j;
  if (!task.name.empty()) j["name"] = task.name;
  j["workspace"] = box_json(task.workspace);
  j["initial"] = box_json(task.initial);
  j["target"] = box_json(task.target);
  j["horizon"] = task.horizon;
  j["min_width"] = task.min_width;
  json pieces = json::array();
  for (const auto& p : task.unsafe.pieces)
    pieces.push_back(json{{"active", json::array({p.active_lo, p.active_hi})},
                          {"lower_poly", p.lower_poly},
                          {"upper_poly", p.upper_poly}});
  j["unsafe"] = std::move(pieces);
  return j.dump(2) + "\n";
}

TaskBundle parse_bundle(const std::string& text, const std::string& name) {
  json j = parse_text(text, "task");
  TaskBundle b;
  b.task = task_from(j, name);
  if (auto it = j.find("synthesis"); it != j.end()) {
    if (!it->is_object()) bad("synthesis: expected an object");
    b.synthesis = synthesis_from(*it);
  }
  if (auto it = j.find("controller"); it != j.end()) {
    if (!it->is_object()) bad("controller: expected an object");
    b.controller = controller_from(*it);
  }
  if (auto it = j.find("simulation"); it != j.end()) {
    if (!it->is_object()) bad("simulation: expected an object");
    b.simulation = simulation_from(*it);
  }
  return b;
}

TaskBundle load_bundle(const std::string& path) {
  std::string name = path;
  if (auto slash = name.find_last_of("/\\"); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_bundle(read_file(path), name);
}

ControllerStack build_stack(const TaskBundle& bundle, const Tube& tube,
                            const std::vector<std::vector<double>>& z0) {
  ControllerStack st = make_stack(tube, z0, bundle.task.horizon);
  const ControllerConfig& cc = bundle.controller;
  st.stage1_gain = cc.stage1_gain;
  st.delta = cc.delta;
  st.xi_mode = cc.xi_mode;
  if (!cc.auto_stages) {
    if (cc.stages.size() != st.stages.size())
      throw Error(Errc::Argument, "controller: plant needs " +
                                      std::to_string(st.stages.size()) +
                                      " funnel stages, document has " +
                                      std::to_string(cc.stages.size()));
    const std::size_t dim = tube.dim();
    for (std::size_t k = 0; k < cc.stages.size(); ++k) {
      const std::string w = "controller.stages[" + std::to_string(k) + "]";
      st.stages[k].p = broadcast(cc.stages[k].p, dim, w + ".p");
      st.stages[k].q = broadcast(cc.stages[k].q, dim, w + ".q");
      st.stages[k].mu = broadcast(cc.stages[k].mu, dim, w + ".mu");
      st.stages[k].gain = cc.stages[k].gain;
    }
    validate_stack(st, z0);
  }
  return st;
}

std::string bundle_config_json(const TaskBundle& bundle) {
  json j;
  j["synthesis"] = json{{"epsilon", bundle.synthesis.epsilon},
                        {"degree", bundle.synthesis.degree},
                        {"strategy", strategy_name(bundle.synthesis.strategy)},
                        {"budget",
                         json{{"max_nodes", bundle.synthesis.budget.max_nodes},
                              {"max_lp_solves", bundle.synthesis.budget.max_lp_solves},
                              {"max_improve_rounds", bundle.synthesis.budget.max_improve_rounds},
                              {"wall_seconds", bundle.synthesis.budget.wall_seconds},
                              {"polish", bundle.synthesis.budget.polish}}}};
  json ctrl;
  ctrl["stage1_gain"] = bundle.controller.stage1_gain;
  ctrl["delta"] = bundle.controller.delta;
  ctrl["xi_mode"] =
      bundle.controller.xi_mode == XiDenominator::Scalar ? "scalar" : "componentwise";
  ctrl["auto_stages"] = bundle.controller.auto_stages;
  if (!bundle.controller.auto_stages) {
    json stages = json::array();
    for (const auto& s : bundle.controller.stages)
      stages.push_back(json{{"p", s.p}, {"q", s.q}, {"mu", s.mu}, {"gain", s.gain}});
    ctrl["stages"] = std::move(stages);
  }
  j["controller"] = std::move(ctrl);
  j["simulation"] = json{{"plant", bundle.simulation.plant},
                         {"x0", bundle.simulation.x0},
                         {"dt", bundle.simulation.dt},
                         {"wbar", bundle.simulation.wbar}};
  return j.dump(2) + "\n";
}

std::string strategy_name(Strategy s) {
  return s == Strategy::Heuristic ? "heuristic" : "exact";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "heuristic") return Strategy::Heuristic;
  if (name == "exact" || name == "exact-bnb" || name == "bnb") return Strategy::ExactBnB;
  throw Error(Errc::Argument, "strategy: 'heuristic' or 'exact', got '" + name + "'");
}

// --------------------------------------------------------------------- tubes

std::string tube_json(const TubeDoc& doc) {
  json j;
  j["basis"] = json{{"kind", "monomial"}, {"degree", doc.tube.basis.degree}};
  j["horizon"] = doc.tube.horizon;
  json lo = json::array(), up = json::array();
  for (const auto& c : doc.tube.lower) {
    for (double v : c.coeffs) finite_or_throw(v, "tube coefficient");
    lo.push_back(c.coeffs);
  }
  for (const auto& c : doc.tube.upper) up.push_back(c.coeffs);
  j["lower"] = std::move(lo);
  j["upper"] = std::move(up);
  if (doc.has_eta) {
    j["eta_star"] = doc.eta_star;
    j["eta_dim"] = doc.eta_dim;
  }
  if (!doc.manifest.empty()) j["manifest"] = doc.manifest;
  return j.dump(2) + "\n";
}

TubeDoc parse_tube(const std::string& text) {
  json j = parse_text(text, "tube");
  if (!j.is_object()) bad("tube: document must be a JSON object");
  TubeDoc d;
  const json& basis = need(j, "basis", "tube");
  if (!basis.is_object()) bad("tube.basis: expected an object");
  if (auto it = basis.find("kind"); it != basis.end() && it->get<std::string>() != "monomial")
    bad("tube.basis.kind: only 'monomial' is understood");
  const json& deg = need(basis, "degree", "tube.basis");
  if (!deg.is_number_integer()) bad("tube.basis.degree: expected an integer");
  d.tube.basis.degree = deg.get<int>();
  if (d.tube.basis.degree < 1) bad("tube.basis.degree: must be >= 1");
  d.tube.horizon = num_field(j, "horizon", "tube");
  if (!(d.tube.horizon > 0.0)) bad("tube.horizon: must be positive");
  auto curves = [&](const char* key) {
    auto list = poly_list(need(j, key, "tube"), std::string("tube.") + key);
    std::vector<BoundaryCurve> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].size() != d.tube.basis.coeff_count())
        bad("tube." + std::string(key) + "[" + std::to_string(i) + "]: expected " +
            std::to_string(d.tube.basis.coeff_count()) + " coefficients");
      for (double v : list[i])
        if (!std::isfinite(v)) bad("tube." + std::string(key) + ": non-finite coefficient");
      out.push_back(BoundaryCurve{std::move(list[i])});
    }
    return out;
  };
  d.tube.lower = curves("lower");
  d.tube.upper = curves("upper");
  if (d.tube.lower.size() != d.tube.upper.size()) bad("tube: lower/upper dimension mismatch");
  if (auto it = j.find("eta_star"); it != j.end()) {
    d.has_eta = true;
    d.eta_star = as_num(*it, "tube.eta_star");
    if (auto ed = j.find("eta_dim"); ed != j.end()) d.eta_dim = num_array(*ed, "tube.eta_dim");
  }
  if (auto it = j.find("manifest"); it != j.end() && it->is_string())
    d.manifest = it->get<std::string>();
  return d;
}

TubeDoc load_tube(const std::string& path) { return parse_tube(read_file(path)); }

// ------------------------------------------------------------------- reports

SynthesisReport make_report(const SynthesisResult& r, std::size_t samples,
                            const std::string& manifest) {
  SynthesisReport rep;
  rep.eta_star = r.eta_star;
  rep.eta_dim = r.eta_dim;
  rep.optimal = r.optimal;
  rep.budget_exhausted = r.budget_exhausted;
  rep.polished = r.polished;
  rep.samples = samples;
  rep.lp_solves = r.lp_solves;
  rep.nodes = r.nodes;
  rep.improvement_rounds = r.improvement_rounds;
  rep.wall_ms = r.wall_ms;
  rep.max_violation = r.max_violation;
  rep.assignment_histogram = r.literal_histogram;
  rep.manifest = manifest;
  return rep;
}

std::string synthesis_report_json(const SynthesisReport& r) {
  json j;
  j["eta_star"] = r.eta_star;
  j["eta_dim"] = r.eta_dim;
  j["optimal"] = r.optimal;
  j["budget_exhausted"] = r.budget_exhausted;
  j["polished"] = r.polished;
  j["samples"] = r.samples;
  j["lp_solves"] = r.lp_solves;
  j["nodes"] = r.nodes;
  j["improvement_rounds"] = r.improvement_rounds;
  j["wall_ms"] = r.wall_ms;
  j["max_violation"] = r.max_violation;
  j["assignment_histogram"] = r.assignment_histogram;
  if (!r.manifest.empty()) j["manifest"] = r.manifest;
  return j.dump(2) + "\n";
}

SynthesisReport parse_synthesis_report(const std::string& text) {
  json j = parse_text(text, "report");
  if (!j.is_object()) bad("report: document must be a JSON object");
  SynthesisReport r;
  r.eta_star = num_field(j, "eta_star", "report");
  if (auto it = j.find("eta_dim"); it != j.end()) r.eta_dim = num_array(*it, "report.eta_dim");
  r.optimal = bool_field(j, "optimal", "report", false);
  r.budget_exhausted = bool_field(j, "budget_exhausted", "report", false);
  r.polished = bool_field(j, "polished", "report", false);
  auto count = [&](const char* key) -> std::size_t {
    auto it = j.find(key);
    return it == j.end() ? 0 : std::size_t(as_num(*it, std::string("report.") + key));
  };
  r.samples = count("samples");
  r.lp_solves = count("lp_solves");
  r.nodes = count("nodes");
  r.improvement_rounds = count("improvement_rounds");
  if (auto it = j.find("wall_ms"); it != j.end()) r.wall_ms = as_num(*it, "report.wall_ms");
  if (auto it = j.find("max_violation"); it != j.end())
    r.max_violation = as_num(*it, "report.max_violation");
  if (auto it = j.find("assignment_histogram"); it != j.end()) {
    if (!it->is_array()) bad("report.assignment_histogram: expected an array");
    for (const auto& v : *it)
      r.assignment_histogram.push_back(std::size_t(as_num(v, "report.assignment_histogram")));
  }
  if (auto it = j.find("manifest"); it != j.end() && it->is_string())
    r.manifest = it->get<std::string>();
  return r;
}

CertificateDoc make_certificate_doc(const CertifyReport& r, const std::string& manifest) {
  CertificateDoc d;
  d.certificate = r.certificate;
  d.L_L = r.L_L;
  d.L_U = r.L_U;
  d.method = r.method == LipschitzMethod::Analytic ? "analytic" : "weibull";
  d.degenerate_fallback = r.degenerate_fallback;
  d.oracle_violations = r.oracle.violations;
  d.oracle_pass = r.oracle.pass();
  d.pass = r.pass;
  d.manifest = manifest;
  return d;
}

std::string certificate_doc_json(const CertificateDoc& d) {
  json j;
  j["eta_star"] = d.certificate.eta_star;
  j["L"] = d.certificate.L;
  j["L_L"] = d.L_L;
  j["L_U"] = d.L_U;
  j["epsilon"] = d.certificate.epsilon;
  j["margin"] = d.certificate.margin;
  j["certificate_pass"] = d.certificate.pass;
  j["method"] = d.method;
  j["degenerate_fallback"] = d.degenerate_fallback;
  j["oracle_violations"] = d.oracle_violations;
  j["oracle_pass"] = d.oracle_pass;
  j["pass"] = d.pass;
  if (!d.manifest.empty()) j["manifest"] = d.manifest;
  return j.dump(2) + "\n";
}

CertificateDoc parse_certificate_doc(const std::string& text) {
  json j = parse_text(text, "certificate");
  if (!j.is_object()) bad("certificate: document must be a JSON object");
  CertificateDoc d;
  d.certificate.eta_star = num_field(j, "eta_star", "certificate");
  d.certificate.L = num_field(j, "L", "certificate");
  d.certificate.epsilon = num_field(j, "epsilon", "certificate");
  d.certificate.margin = num_field(j, "margin", "certificate");
  d.certificate.pass = bool_field(j, "certificate_pass", "certificate", false);
  if (auto it = j.find("L_L"); it != j.end()) d.L_L = as_num(*it, "certificate.L_L");
  if (auto it = j.find("L_U"); it != j.end()) d.L_U = as_num(*it, "certificate.L_U");
  if (auto it = j.find("method"); it != j.end() && it->is_string())
    d.method = it->get<std::string>();
  d.degenerate_fallback = bool_field(j, "degenerate_fallback", "certificate", false);
  if (auto it = j.find("oracle_violations"); it != j.end())
    d.oracle_violations = std::size_t(as_num(*it, "certificate.oracle_violations"));
  d.oracle_pass = bool_field(j, "oracle_pass", "certificate", false);
  d.pass = bool_field(j, "pass", "certificate", false);
  if (auto it = j.find("manifest"); it != j.end() && it->is_string())
    d.manifest = it->get<std::string>();
  return d;
}

bool parse_certificate_inputs(const std::string& text, double& eta_star, double& L,
                              double& epsilon) {
  json j = parse_text(text, "certificate");
  if (!j.is_object()) return false;
  auto e = j.find("eta_star"), l = j.find("L"), ep = j.find("epsilon");
  if (e == j.end() || l == j.end() || ep == j.end()) return false;
  if (!e->is_number() || !l->is_number() || !ep->is_number()) return false;
  eta_star = e->get<double>();
  L = l->get<double>();
  epsilon = ep->get<double>();
  return true;
}

std::string check_report_json(const SttCheckReport& r) {
  static const char* kind_names[] = {"workspace", "start", "goal", "obstacle", "width"};
  json j;
  j["pass"] = r.pass();
  j["violations"] = r.violations;
  j["time_steps"] = r.time_steps;
  j["edge_steps"] = r.edge_steps;
  json sample = json::array();
  for (const auto& v : r.sample)
    sample.push_back(json{{"kind", kind_names[int(v.kind)]},
                          {"dim", v.dim},
                          {"t", v.t},
                          {"piece", v.piece},
                          {"value", v.value},
                          {"bound", v.bound}});
  j["sample"] = std::move(sample);
  return j.dump(2) + "\n";
}

// ------------------------------------------------------------------ manifest

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = digits[v & 0xf];
  return s;
}

namespace {
// Configuration subset in canonical (sorted-key, compact) form; timings stay
// out so identical setups hash identically across runs.
json manifest_config(const RunManifest& m) {
  json j;
  j["tool"] = m.tool;
  j["task_path"] = m.task_path;
  j["task_hash"] = m.task_hash;
  j["epsilon"] = m.epsilon;
  j["degree"] = m.degree;
  j["strategy"] = m.strategy;
  j["seed"] = m.seed;
  return j;
}
}  // namespace

std::string manifest_hash(const RunManifest& m) {
  return hex64(fnv1a64(manifest_config(m).dump()));
}

std::string manifest_json(const RunManifest& m) {
  json j = manifest_config(m);
  j["hash"] = manifest_hash(m);
  json timings = json::array();
  for (const auto& t : m.timings) timings.push_back(json{{"phase", t.phase}, {"ms", t.ms}});
  j["timings"] = std::move(timings);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------- io

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, "read failed on '" + path + "'");
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed on '" + path + "'");
}

}  // namespace stt
