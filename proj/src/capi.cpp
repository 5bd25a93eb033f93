#include "stt.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "stt/certify.hpp"
#include "stt/error.hpp"
#include "stt/funnel.hpp"
#include "stt/plants.hpp"
#include "stt/sampler.hpp"
#include "stt/serialize.hpp"
#include "stt/sop.hpp"
#include "stt/task.hpp"
#include "stt/tube.hpp"

// Handle definitions. Each is a thin box around the core value types; the
// library never hands out interior pointers except borrowed strings that
// live as long as the handle.

struct stt_task {
  stt::TaskBundle bundle;
  std::string source;  // bytes the task was parsed from, for hashing
};

struct stt_net {
  stt::AugmentedSampleSet net;
};

struct stt_tube {
  stt::TubeDoc doc;
};

struct stt_synthesis {
  stt::SynthesisResult result;
  std::size_t samples = 0;
};

struct stt_certificate {
  stt::CertifyReport report;
};

struct stt_trajectory {
  stt::TrajectoryLog log;
  stt::TrasVerdict verdict;
};

namespace {

thread_local int g_code = STT_OK;
thread_local std::string g_message;

void fail(int code, std::string msg) {
  g_code = code;
  g_message = std::move(msg);
}

// Runs the body with the thread error state cleared; any exception becomes a
// recorded code and the fallback return value.
template <class F>
auto guarded(F&& body, std::invoke_result_t<F> fallback) -> std::invoke_result_t<F> {
  g_code = STT_OK;
  g_message.clear();
  try {
    return body();
  } catch (const stt::Error& e) {
    fail(int(e.code), e.what());
  } catch (const std::exception& e) {
    fail(STT_E_INTERNAL, e.what());
  }
  return fallback;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

[[noreturn]] void reject(const std::string& msg) {
  throw stt::Error(stt::Errc::Argument, msg);
}

template <class H>
const H& deref(const H* h, const char* what) {
  if (!h) reject(std::string(what) + ": null handle");
  return *h;
}

std::string opt(const char* s) { return s ? s : ""; }

}  // namespace

extern "C" {

const char* stt_version(void) { return "0.1.0"; }

int stt_last_error_code(void) { return g_code; }

const char* stt_last_error(void) { return g_message.c_str(); }

void stt_string_free(char* s) { std::free(s); }

uint64_t stt_fnv1a64(const void* bytes, size_t n) {
  return stt::fnv1a64(std::string_view(static_cast<const char*>(bytes), n));
}

/* ------------------------------------------------------------------ tasks */

stt_task* stt_task_load(const char* path) {
  return guarded(
      [&]() -> stt_task* {
        if (!path) reject("task_load: null path");
        auto h = new stt_task;
        h->source = stt::read_file(path);
        std::string name = path;
        if (auto slash = name.find_last_of("/\\"); slash != std::string::npos)
          name = name.substr(slash + 1);
        if (auto dot = name.find_last_of('.'); dot != std::string::npos)
          name = name.substr(0, dot);
        try {
          h->bundle = stt::parse_bundle(h->source, name);
        } catch (...) {
          delete h;
          throw;
        }
        return h;
      },
      nullptr);
}

stt_task* stt_task_parse(const char* json_text, const char* name) {
  return guarded(
      [&]() -> stt_task* {
        if (!json_text) reject("task_parse: null text");
        auto h = new stt_task;
        h->source = json_text;
        try {
          h->bundle = stt::parse_bundle(h->source, opt(name));
        } catch (...) {
          delete h;
          throw;
        }
        return h;
      },
      nullptr);
}

void stt_task_free(stt_task* t) { delete t; }

size_t stt_task_dimension(const stt_task* t) {
  return guarded([&]() -> size_t { return deref(t, "task").bundle.task.dimension; }, 0);
}

double stt_task_horizon(const stt_task* t) {
  return guarded([&] { return deref(t, "task").bundle.task.horizon; }, 0.0);
}

const char* stt_task_name(const stt_task* t) {
  return guarded([&] { return deref(t, "task").bundle.task.name.c_str(); },
                 static_cast<const char*>(nullptr));
}

char* stt_task_json(const stt_task* t) {
  return guarded([&] { return dup_string(stt::task_json(deref(t, "task").bundle.task)); },
                 nullptr);
}

char* stt_task_config_json(const stt_task* t) {
  return guarded([&] { return dup_string(stt::bundle_config_json(deref(t, "task").bundle)); },
                 nullptr);
}

char* stt_task_source_hash(const stt_task* t) {
  return guarded(
      [&] { return dup_string(stt::hex64(stt::fnv1a64(deref(t, "task").source))); }, nullptr);
}

int stt_task_box(const stt_task* t, const char* which, double* lo, double* up, size_t cap) {
  return guarded(
      [&]() -> int {
        const stt::TRasTask& task = deref(t, "task").bundle.task;
        const std::string w = opt(which);
        const stt::Box* b = nullptr;
        if (w == "workspace") b = &task.workspace;
        if (w == "initial") b = &task.initial;
        if (w == "target") b = &task.target;
        if (!b) reject("task_box: which must be workspace/initial/target");
        for (size_t i = 0; i < std::min(cap, b->dim()); ++i) {
          if (lo) lo[i] = b->lower[i];
          if (up) up[i] = b->upper[i];
        }
        return int(b->dim());
      },
      -1);
}

size_t stt_task_unsafe_count(const stt_task* t) {
  return guarded([&]() -> size_t { return deref(t, "task").bundle.task.unsafe.pieces.size(); },
                 0);
}

double stt_task_unsafe_window(const stt_task* t, size_t piece, int end) {
  return guarded(
      [&]() -> double {
        const auto& pieces = deref(t, "task").bundle.task.unsafe.pieces;
        if (piece >= pieces.size()) reject("unsafe_window: piece out of range");
        return end ? pieces[piece].active_hi : pieces[piece].active_lo;
      },
      std::nan(""));
}

int stt_task_unsafe_box(const stt_task* t, size_t piece, double tq, double* lo, double* up,
                        size_t cap) {
  return guarded(
      [&]() -> int {
        const auto& pieces = deref(t, "task").bundle.task.unsafe.pieces;
        if (piece >= pieces.size()) reject("unsafe_box: piece out of range");
        const stt::TimedRegion& r = pieces[piece];
        stt::Box b = r.box_at(tq);
        for (size_t i = 0; i < std::min(cap, b.dim()); ++i) {
          if (lo) lo[i] = b.lower[i];
          if (up) up[i] = b.upper[i];
        }
        return r.active_at(tq) ? 1 : 0;
      },
      -1);
}

/* ------------------------------------------------------------------- nets */

stt_net* stt_net_build(const stt_task* t, double epsilon) {
  return guarded(
      [&]() -> stt_net* {
        stt::NetParams params;
        params.epsilon = epsilon;
        return new stt_net{stt::build_net(deref(t, "task").bundle.task, params)};
      },
      nullptr);
}

void stt_net_free(stt_net* n) { delete n; }

size_t stt_net_samples(const stt_net* n) {
  return guarded([&] { return deref(n, "net").net.sample_count(); }, size_t(0));
}

int stt_net_verify(const stt_net* n, const stt_task* t, size_t probes, uint64_t seed,
                   double* max_gap) {
  return guarded(
      [&]() -> int {
        auto res = stt::verify_net(deref(n, "net").net, deref(t, "task").bundle.task, probes,
                                   seed);
        if (max_gap) *max_gap = res.max_gap;
        return res.pass ? 0 : 2;
      },
      -1);
}

char* stt_net_csv(const stt_net* n, const char* manifest_hex) {
  return guarded(
      [&]() -> char* {
        std::ostringstream os;
        stt::write_net_csv(deref(n, "net").net, os,
                           manifest_hex && *manifest_hex ? manifest_hex : nullptr);
        return dup_string(os.str());
      },
      nullptr);
}

/* -------------------------------------------------------------- synthesis */

stt_synthesis* stt_synthesize(const stt_task* t, const stt_net* n, int degree, int strategy) {
  return guarded(
      [&]() -> stt_synthesis* {
        const stt_task& task = deref(t, "task");
        const stt_net& net = deref(n, "net");
        stt::BasisSpec basis;
        basis.degree = degree;
        stt::SopInstance inst = stt::assemble(task.bundle.task, net.net, basis);
        stt::Strategy strat = strategy == STT_STRATEGY_HEURISTIC ? stt::Strategy::Heuristic
                                                                 : stt::Strategy::ExactBnB;
        auto h = new stt_synthesis;
        try {
          h->result = stt::synthesize(inst, strat, task.bundle.synthesis.budget);
          h->samples = net.net.sample_count();
        } catch (...) {
          delete h;
          throw;
        }
        return h;
      },
      nullptr);
}

void stt_synthesis_free(stt_synthesis* s) { delete s; }

double stt_synthesis_eta_star(const stt_synthesis* s) {
  return guarded([&] { return deref(s, "synthesis").result.eta_star; }, std::nan(""));
}

int stt_synthesis_optimal(const stt_synthesis* s) {
  return guarded([&]() -> int { return deref(s, "synthesis").result.optimal ? 1 : 0; }, -1);
}

stt_tube* stt_synthesis_tube(const stt_synthesis* s, const char* manifest_hex) {
  return guarded(
      [&]() -> stt_tube* {
        const stt::SynthesisResult& r = deref(s, "synthesis").result;
        stt::TubeDoc doc;
        doc.tube = r.tube;
        doc.has_eta = true;
        doc.eta_star = r.eta_star;
        doc.eta_dim = r.eta_dim;
        doc.manifest = opt(manifest_hex);
        return new stt_tube{std::move(doc)};
      },
      nullptr);
}

char* stt_synthesis_report_json(const stt_synthesis* s, const char* manifest_hex) {
  return guarded(
      [&]() -> char* {
        const stt_synthesis& h = deref(s, "synthesis");
        stt::SynthesisReport rep = stt::make_report(h.result, h.samples, opt(manifest_hex));
        return dup_string(stt::synthesis_report_json(rep));
      },
      nullptr);
}

/* ------------------------------------------------------------------ tubes */

stt_tube* stt_tube_load(const char* path) {
  return guarded(
      [&]() -> stt_tube* {
        if (!path) reject("tube_load: null path");
        return new stt_tube{stt::load_tube(path)};
      },
      nullptr);
}

stt_tube* stt_tube_parse(const char* json_text) {
  return guarded(
      [&]() -> stt_tube* {
        if (!json_text) reject("tube_parse: null text");
        return new stt_tube{stt::parse_tube(json_text)};
      },
      nullptr);
}

void stt_tube_free(stt_tube* tb) { delete tb; }

char* stt_tube_json(const stt_tube* tb) {
  return guarded([&] { return dup_string(stt::tube_json(deref(tb, "tube").doc)); }, nullptr);
}

size_t stt_tube_dimension(const stt_tube* tb) {
  return guarded([&] { return deref(tb, "tube").doc.tube.dim(); }, size_t(0));
}

int stt_tube_degree(const stt_tube* tb) {
  return guarded([&] { return deref(tb, "tube").doc.tube.basis.degree; }, -1);
}

double stt_tube_horizon(const stt_tube* tb) {
  return guarded([&] { return deref(tb, "tube").doc.tube.horizon; }, std::nan(""));
}

double stt_tube_eval(const stt_tube* tb, size_t dim, int side, double t) {
  return guarded(
      [&]() -> double {
        const stt::Tube& tube = deref(tb, "tube").doc.tube;
        if (dim >= tube.dim()) reject("tube_eval: dimension out of range");
        return tube.eval(dim, side == STT_SIDE_UPPER ? stt::Side::Upper : stt::Side::Lower, t);
      },
      std::nan(""));
}

int stt_tube_eta(const stt_tube* tb, double* eta_star) {
  return guarded(
      [&]() -> int {
        const stt::TubeDoc& doc = deref(tb, "tube").doc;
        if (doc.has_eta && eta_star) *eta_star = doc.eta_star;
        return doc.has_eta ? 1 : 0;
      },
      -1);
}

int stt_tube_check(const stt_tube* tb, const stt_task* t, size_t time_steps,
                   size_t edge_steps, size_t* violations) {
  return guarded(
      [&]() -> int {
        auto report = stt::check_stt(deref(tb, "tube").doc.tube, deref(t, "task").bundle.task,
                                     time_steps, edge_steps);
        if (violations) *violations = report.violations;
        return 0;
      },
      -1);
}

char* stt_tube_check_report_json(const stt_tube* tb, const stt_task* t, size_t time_steps,
                                 size_t edge_steps) {
  return guarded(
      [&]() -> char* {
        auto report = stt::check_stt(deref(tb, "tube").doc.tube, deref(t, "task").bundle.task,
                                     time_steps, edge_steps);
        return dup_string(stt::check_report_json(report));
      },
      nullptr);
}

/* ---------------------------------------------------------------- certify */

double stt_check_certificate(double eta_star, double L, double epsilon, int* pass) {
  return guarded(
      [&]() -> double {
        stt::Certificate c = stt::check_certificate(eta_star, L, epsilon);
        if (pass) *pass = c.pass ? 1 : 0;
        return c.margin;
      },
      std::nan(""));
}

double stt_combine_lipschitz(double l_lower, double l_upper) {
  return guarded([&] { return stt::combine_lipschitz(l_lower, l_upper); }, std::nan(""));
}

stt_certificate* stt_certify(const stt_tube* tb, const stt_task* t, double epsilon,
                             int method, uint64_t seed) {
  return guarded(
      [&]() -> stt_certificate* {
        const stt::TubeDoc& doc = deref(tb, "tube").doc;
        if (!doc.has_eta)
          reject("certify: tube document carries no eta_star (synthesis output does)");
        stt::CertifyOptions opts;
        opts.method = method == STT_LIPSCHITZ_WEIBULL ? stt::LipschitzMethod::ReverseWeibull
                                                      : stt::LipschitzMethod::Analytic;
        opts.seed = seed;
        return new stt_certificate{stt::certify_pipeline(
            doc.tube, doc.eta_star, deref(t, "task").bundle.task, epsilon, opts)};
      },
      nullptr);
}

void stt_certificate_free(stt_certificate* c) { delete c; }

int stt_certificate_pass(const stt_certificate* c) {
  return guarded([&]() -> int { return deref(c, "certificate").report.pass ? 1 : 0; }, -1);
}

int stt_certificate_margin_pass(const stt_certificate* c) {
  return guarded(
      [&]() -> int { return deref(c, "certificate").report.certificate.pass ? 1 : 0; }, -1);
}

double stt_certificate_margin(const stt_certificate* c) {
  return guarded([&] { return deref(c, "certificate").report.certificate.margin; },
                 std::nan(""));
}

char* stt_certificate_json(const stt_certificate* c, const char* manifest_hex) {
  return guarded(
      [&]() -> char* {
        auto doc = stt::make_certificate_doc(deref(c, "certificate").report,
                                             opt(manifest_hex));
        return dup_string(stt::certificate_doc_json(doc));
      },
      nullptr);
}

/* --------------------------------------------------------------- simulate */

stt_trajectory* stt_simulate(const stt_task* t, const stt_tube* tb, const char* plant,
                             double dt, double wbar, uint64_t seed) {
  return guarded(
      [&]() -> stt_trajectory* {
        const stt::TaskBundle& bundle = deref(t, "task").bundle;
        const stt::Tube& tube = deref(tb, "tube").doc.tube;
        std::string pname = opt(plant);
        if (pname.empty()) pname = bundle.simulation.plant;
        if (pname.empty()) reject("simulate: no plant given and the task bundle names none");
        const double dtv = dt > 0 ? dt : bundle.simulation.dt;
        const double wv = wbar >= 0 ? wbar : bundle.simulation.wbar;
        stt::PlantModel pm = stt::builtin_plant(pname, wv);
        if (pm.output_dim != bundle.task.dimension)
          throw stt::Error(stt::Errc::DimensionMismatch,
                           "simulate: plant output dimension " +
                               std::to_string(pm.output_dim) + " vs task dimension " +
                               std::to_string(bundle.task.dimension));
        if (tube.dim() != pm.output_dim)
          throw stt::Error(stt::Errc::DimensionMismatch,
                           "simulate: tube/plant dimension mismatch");
        const std::vector<double>& x0 = bundle.simulation.x0;
        if (x0.size() != pm.state_dim)
          reject("simulate: bundle simulation.x0 must have " + std::to_string(pm.state_dim) +
                 " entries for plant '" + pname + "'");
        stt::ControllerStack stack = stt::build_stack(bundle, tube, pm.stage_blocks(x0));
        auto h = new stt_trajectory;
        try {
          h->log = stt::simulate(pm, stack, x0, dtv, bundle.task.horizon, seed);
          h->verdict = stt::evaluate_tras(h->log, bundle.task);
        } catch (...) {
          delete h;
          throw;
        }
        return h;
      },
      nullptr);
}

void stt_trajectory_free(stt_trajectory* tr) { delete tr; }

int stt_trajectory_pass(const stt_trajectory* tr) {
  return guarded([&]() -> int { return deref(tr, "trajectory").verdict.pass() ? 1 : 0; }, -1);
}

char* stt_trajectory_verdict_json(const stt_trajectory* tr) {
  return guarded(
      [&]() -> char* {
        const stt_trajectory& h = deref(tr, "trajectory");
        nlohmann::json j;
        j["reached"] = h.verdict.reached;
        j["safe"] = h.verdict.safe;
        j["contained"] = h.verdict.contained;
        j["pass"] = h.verdict.pass();
        j["note"] = h.verdict.note;
        j["steps"] = h.log.steps();
        j["dt"] = h.log.dt;
        j["guard_steps"] = h.log.guard_steps;
        j["min_effectiveness"] = h.log.min_effectiveness;
        j["controller_clamped"] = h.log.controller_clamped;
        return dup_string(j.dump(2) + "\n");
      },
      nullptr);
}

char* stt_trajectory_csv(const stt_trajectory* tr, const char* manifest_hex) {
  return guarded(
      [&]() -> char* {
        const stt_trajectory& h = deref(tr, "trajectory");
        std::ostringstream os;
        if (manifest_hex && *manifest_hex) os << "# manifest " << manifest_hex << "\n";
        stt::write_trajectory_csv(h.log, os);
        return dup_string(os.str());
      },
      nullptr);
}

size_t stt_trajectory_rows(const stt_trajectory* tr) {
  return guarded([&] { return deref(tr, "trajectory").log.t.size(); }, size_t(0));
}

int stt_trajectory_series(const stt_trajectory* tr, const char* series, size_t index,
                          double* out, size_t cap) {
  return guarded(
      [&]() -> int {
        const stt::TrajectoryLog& log = deref(tr, "trajectory").log;
        if (!out) reject("trajectory_series: null output buffer");
        const std::string name = opt(series);
        const size_t rows = std::min(cap, log.t.size());
        auto column = [&](const std::vector<std::vector<double>>& m) -> int {
          if (m.empty() || index >= m[0].size())
            reject("trajectory_series: channel " + std::to_string(index) +
                   " out of range for '" + name + "'");
          for (size_t k = 0; k < rows; ++k) out[k] = m[k][index];
          return int(rows);
        };
        if (name == "t") {
          for (size_t k = 0; k < rows; ++k) out[k] = log.t[k];
          return int(rows);
        }
        if (name == "x") return column(log.x);
        if (name == "y") return column(log.y);
        if (name == "u") return column(log.u);
        if (name == "lo") return column(log.tube_lo);
        if (name == "up") return column(log.tube_up);
        reject("trajectory_series: unknown series '" + name + "'");
      },
      -1);
}

} /* extern "C" */
