#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stt/certify.hpp"
#include "stt/funnel.hpp"
#include "stt/sop.hpp"
#include "stt/task.hpp"
#include "stt/tube.hpp"

// JSON documents for tasks, tubes, reports and run manifests. Everything is
// exchanged as text; the parser lives behind this boundary so callers never
// touch a JSON library. Numbers are written in shortest round-trip decimal
// form (up to 17 significant digits), so dump -> parse preserves doubles
// bit-exactly.

namespace stt {

// ------------------------------------------------------------------- bundles

struct SynthesisConfig {
  double epsilon = 0.05;
  int degree = 2;
  Strategy strategy = Strategy::ExactBnB;
  SynthesisBudget budget{};
};

// Explicit funnel stage; scalar entries broadcast across dimensions when the
// document stores a single number.
struct StageConfig {
  std::vector<double> p, q, mu;
  double gain = 1.0;
};

struct ControllerConfig {
  double stage1_gain = 1.0;
  double delta = 1e-6;
  XiDenominator xi_mode = XiDenominator::Scalar;
  bool auto_stages = true;          // derive funnels from the start state
  std::vector<StageConfig> stages;  // used when auto_stages is false
};

struct SimulationConfig {
  std::string plant;  // builtin plant name; empty when the bundle has none
  std::vector<double> x0;
  double dt = 1e-3;
  double wbar = 0.05;
};

// A task file is the task itself plus optional tool-configuration blocks
// ("synthesis", "controller", "simulation"); plain task documents parse as
// bundles with all defaults.
struct TaskBundle {
  TRasTask task;
  SynthesisConfig synthesis;
  ControllerConfig controller;
  SimulationConfig simulation;
};

// Parse failures throw Error{Parse} naming the offending field (syntax errors
// carry the line/column); structural task violations throw Error{InvalidTask}.
TRasTask parse_task(const std::string& text, const std::string& name = "");
std::string task_json(const TRasTask& task);

TaskBundle parse_bundle(const std::string& text, const std::string& name = "");
TaskBundle load_bundle(const std::string& path);  // Error{Io} when unreadable

// Controller stack for a bundle: auto funnels from the stage blocks at t = 0,
// then gain/funnel overrides from the document, re-validated afterwards.
ControllerStack build_stack(const TaskBundle& bundle, const Tube& tube,
                            const std::vector<std::vector<double>>& z0);

// The bundle's tool-configuration blocks as one JSON object (for consumers
// that want the defaults without re-reading the task file).
std::string bundle_config_json(const TaskBundle& bundle);

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);  // Error{Argument}

// --------------------------------------------------------------------- tubes

struct TubeDoc {
  Tube tube;
  bool has_eta = false;  // synthesis slack travels with the tube when known
  double eta_star = 0.0;
  std::vector<double> eta_dim;
  std::string manifest;  // producing run's manifest hash, empty when absent
};

std::string tube_json(const TubeDoc& doc);
TubeDoc parse_tube(const std::string& text);
TubeDoc load_tube(const std::string& path);

// ------------------------------------------------------------------- reports

struct SynthesisReport {
  double eta_star = 0.0;
  std::vector<double> eta_dim;
  bool optimal = false;
  bool budget_exhausted = false;
  bool polished = false;
  std::size_t samples = 0;
  std::size_t lp_solves = 0;
  std::size_t nodes = 0;
  std::size_t improvement_rounds = 0;
  double wall_ms = 0.0;
  double max_violation = 0.0;
  std::vector<std::size_t> assignment_histogram;  // counts by literal code
  std::string manifest;
};

SynthesisReport make_report(const SynthesisResult& r, std::size_t samples,
                            const std::string& manifest);
std::string synthesis_report_json(const SynthesisReport& r);
SynthesisReport parse_synthesis_report(const std::string& text);

struct CertificateDoc {
  Certificate certificate;
  double L_L = 0.0;
  double L_U = 0.0;
  std::string method;  // "analytic" | "weibull"
  bool degenerate_fallback = false;
  std::size_t oracle_violations = 0;
  bool oracle_pass = false;
  bool pass = false;
  std::string manifest;
};

CertificateDoc make_certificate_doc(const CertifyReport& r, const std::string& manifest);
std::string certificate_doc_json(const CertificateDoc& d);
CertificateDoc parse_certificate_doc(const std::string& text);

// Pull (eta_star, L, epsilon) back out of any document carrying them, so a
// margin can be recomputed from a report alone.
bool parse_certificate_inputs(const std::string& text, double& eta_star, double& L,
                              double& epsilon);

// Oracle scan result with the recorded violation samples.
std::string check_report_json(const SttCheckReport& r);

// ------------------------------------------------------------------ manifest

struct PhaseTiming {
  std::string phase;
  double ms = 0.0;
};

// One manifest per tool run; artifacts carry its hash so they can be traced
// back to the exact configuration that produced them. The hash covers the
// configuration fields only (not timings), so re-running the same setup
// reproduces the same hash and byte-identical data artifacts.
struct RunManifest {
  std::string tool;       // name + version
  std::string task_path;
  std::string task_hash;  // fnv1a64 of the task file bytes, hex
  double epsilon = 0.0;
  int degree = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<PhaseTiming> timings;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string manifest_hash(const RunManifest& m);  // over the canonical config dump
std::string manifest_json(const RunManifest& m);  // includes "hash" and timings

// ---------------------------------------------------------------------- io

std::string read_file(const std::string& path);                    // Error{Io}
void write_file(const std::string& path, const std::string& text); // Error{Io}

}  // namespace stt
