#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stt/error.hpp"
#include "stt/rng.hpp"
#include "stt/serialize.hpp"
#include "support/reference_tubes.hpp"
#include "support/task_gen.hpp"

using namespace stt;
using namespace testsupport;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_box(const Box& got, const Box& want) {
  REQUIRE(got.dim() == want.dim());
  for (std::size_t i = 0; i < want.dim(); ++i) {
    CHECK(same_bits(got.lower[i], want.lower[i]));
    CHECK(same_bits(got.upper[i], want.upper[i]));
  }
}

template <class Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("task documents round-trip") {
  for (std::uint64_t seed : {1, 2, 3, 9}) {
    TRasTask t = random_box_field_task(seed);
    TRasTask back = parse_task(task_json(t));
    CHECK(back.name == t.name);
    CHECK(back.dimension == t.dimension);
    check_box(back.workspace, t.workspace);
    check_box(back.initial, t.initial);
    check_box(back.target, t.target);
    CHECK(same_bits(back.horizon, t.horizon));
    REQUIRE(back.min_width.size() == t.min_width.size());
    for (std::size_t i = 0; i < t.min_width.size(); ++i)
      CHECK(same_bits(back.min_width[i], t.min_width[i]));
    REQUIRE(back.unsafe.pieces.size() == t.unsafe.pieces.size());
    for (std::size_t k = 0; k < t.unsafe.pieces.size(); ++k) {
      const auto& a = back.unsafe.pieces[k];
      const auto& b = t.unsafe.pieces[k];
      CHECK(same_bits(a.active_lo, b.active_lo));
      CHECK(same_bits(a.active_hi, b.active_hi));
      CHECK(a.lower_poly == b.lower_poly);
      CHECK(a.upper_poly == b.upper_poly);
    }
  }

  // timed activation window survives the trip
  TRasTask m = maglev_reference_task();
  TRasTask back = parse_task(task_json(m));
  REQUIRE(back.unsafe.pieces.size() == 1);
  CHECK(back.unsafe.pieces[0].active_lo == 1.5);
  CHECK(back.unsafe.pieces[0].active_hi == 3.5);
  CHECK(back.unsafe.pieces[0].upper_poly[0][0] == 3.0);
}

TEST_CASE("task parsing diagnostics name the field") {
  // syntax errors carry the line number from the underlying parser
  std::string syntax = error_message([] { parse_task("{\n  \"workspace\": ]\n}"); });
  CHECK(syntax.find("line 2") != std::string::npos);

  std::string missing = error_message([] { parse_task(R"({"initial": {}})"); });
  CHECK(missing.find("workspace") != std::string::npos);

  std::string badbox =
      error_message([] { parse_task(R"({"workspace": {"lower": [0], "upper": "x"}})"); });
  CHECK(badbox.find("workspace.upper") != std::string::npos);

  std::string window = error_message([] {
    parse_task(R"({"workspace": {"lower": [0], "upper": [5]},
                   "initial": {"lower": [1], "upper": [2]},
                   "target": {"lower": [3], "upper": [4]},
                   "horizon": 5, "min_width": 0.1,
                   "unsafe": [{"active": [1], "lower_poly": [[0]], "upper_poly": [[1]]}]})");
  });
  CHECK(window.find("active") != std::string::npos);

  // structurally sound but semantically broken -> task validation kicks in
  CHECK_THROWS_AS(parse_task(R"({"workspace": {"lower": [0], "upper": [5]},
                                 "initial": {"lower": [2], "upper": [1]},
                                 "target": {"lower": [3], "upper": [4]},
                                 "horizon": 5, "min_width": 0.1})"),
                  Error);
}

TEST_CASE("scalar min_width broadcasts across dimensions") {
  TRasTask t = parse_task(R"({
    "workspace": {"lower": [0, 0], "upper": [5, 5]},
    "initial": {"lower": [1, 1], "upper": [2, 2]},
    "target": {"lower": [3, 3], "upper": [4, 4]},
    "horizon": 5,
    "min_width": 0.1})");
  REQUIRE(t.min_width.size() == 2);
  CHECK(t.min_width[0] == 0.1);
  CHECK(t.min_width[1] == 0.1);
}

TEST_CASE("tube documents preserve coefficients bit-exactly") {
  std::mt19937_64 g(20260815);
  auto rough = [&]() {
    // wide dynamic range, non-terminating decimal expansions included
    double m = uniform(g, -1.0, 1.0);
    double v = std::ldexp(m, int(g() % 61) - 30);
    return (g() % 2) ? v : v * (3.0 / 7.0);
  };

  for (int rep = 0; rep < 40; ++rep) {
    TubeDoc doc;
    doc.tube.basis.degree = 1 + int(g() % 5);
    doc.tube.horizon = uniform(g, 0.5, 30.0);
    std::size_t n = 1 + g() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      BoundaryCurve lo, up;
      for (std::size_t k = 0; k < doc.tube.basis.coeff_count(); ++k) {
        lo.coeffs.push_back(rough());
        up.coeffs.push_back(rough());
      }
      doc.tube.lower.push_back(lo);
      doc.tube.upper.push_back(up);
    }
    if (rep % 3 == 0) {
      doc.has_eta = true;
      doc.eta_star = rough();
      doc.eta_dim.assign(n, rough());
    }
    TubeDoc back = parse_tube(tube_json(doc));
    CHECK(back.tube.basis.degree == doc.tube.basis.degree);
    CHECK(same_bits(back.tube.horizon, doc.tube.horizon));
    REQUIRE(back.tube.dim() == n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < doc.tube.basis.coeff_count(); ++k) {
        CHECK(same_bits(back.tube.lower[i].coeffs[k], doc.tube.lower[i].coeffs[k]));
        CHECK(same_bits(back.tube.upper[i].coeffs[k], doc.tube.upper[i].coeffs[k]));
      }
    CHECK(back.has_eta == doc.has_eta);
    if (doc.has_eta) CHECK(same_bits(back.eta_star, doc.eta_star));
  }

  // the classically awkward decimals
  TubeDoc d;
  d.tube.basis.degree = 1;
  d.tube.horizon = 5.0;
  d.tube.lower.push_back({{0.1, 1.0 / 3.0}});
  d.tube.upper.push_back({{-0.0, 4.9406564584124654e-310}});
  TubeDoc back = parse_tube(tube_json(d));
  CHECK(same_bits(back.tube.lower[0].coeffs[0], 0.1));
  CHECK(same_bits(back.tube.lower[0].coeffs[1], 1.0 / 3.0));
  CHECK(same_bits(back.tube.upper[0].coeffs[0], -0.0));
  CHECK(same_bits(back.tube.upper[0].coeffs[1], 4.9406564584124654e-310));
}

TEST_CASE("tube document validation") {
  TubeDoc doc;
  doc.tube = maglev_reference_tube();
  doc.manifest = "deadbeefdeadbeef";
  TubeDoc back = parse_tube(tube_json(doc));
  CHECK(back.manifest == "deadbeefdeadbeef");
  CHECK_FALSE(back.has_eta);

  CHECK(error_message([] {
          parse_tube(R"({"basis": {"degree": 0}, "horizon": 5,
                         "lower": [[1, 2]], "upper": [[3, 4]]})");
        }).find("degree") != std::string::npos);

  // coefficient count must match the declared degree
  CHECK_THROWS_AS(parse_tube(R"({"basis": {"degree": 2}, "horizon": 5,
                                 "lower": [[1, 2]], "upper": [[3, 4, 5]]})"),
                  Error);

  // non-finite coefficients serialize to null and are rejected on input
  CHECK_THROWS_AS(parse_tube(R"({"basis": {"degree": 1}, "horizon": 5,
                                 "lower": [[1, null]], "upper": [[3, 4]]})"),
                  Error);

  CHECK_THROWS_AS(parse_tube(R"({"basis": {"degree": 1}, "horizon": 5,
                                 "lower": [[1, 2], [0, 0]], "upper": [[3, 4]]})"),
                  Error);
}

TEST_CASE("bundle blocks configure synthesis and the controller") {
  const std::string text = R"({
    "name": "maglev",
    "workspace": {"lower": [0], "upper": [5]},
    "initial": {"lower": [0.75], "upper": [1.25]},
    "target": {"lower": [0.75], "upper": [1.25]},
    "horizon": 5,
    "min_width": [0.1],
    "unsafe": [{"active": [1.5, 3.5], "lower_poly": [[0]], "upper_poly": [[3]]}],
    "synthesis": {"epsilon": 0.05, "degree": 2, "strategy": "exact",
                  "budget": {"max_nodes": 64, "polish": true}},
    "controller": {"stage1_gain": 0.28,
                   "stages": [{"p": 3.2, "q": 1.1, "mu": 0.2, "gain": 84.0},
                              {"p": 15.0, "q": 7.5, "mu": 25.0, "gain": 580.0}]},
    "simulation": {"plant": "maglev", "x0": [1.0, 0.0, 9.8], "dt": 1e-4, "wbar": 0.05}
  })";
  TaskBundle b = parse_bundle(text);
  CHECK(b.task.name == "maglev");
  CHECK(b.synthesis.epsilon == 0.05);
  CHECK(b.synthesis.strategy == Strategy::ExactBnB);
  CHECK(b.synthesis.budget.max_nodes == 64);
  CHECK_FALSE(b.controller.auto_stages);
  REQUIRE(b.controller.stages.size() == 2);
  CHECK(b.simulation.plant == "maglev");
  CHECK(b.simulation.dt == 1e-4);
  REQUIRE(b.simulation.x0.size() == 3);

  ControllerStack st =
      build_stack(b, maglev_reference_tube(), {{1.0}, {0.0}, {9.8}});
  CHECK(st.stage1_gain == 0.28);
  REQUIRE(st.stages.size() == 2);
  CHECK(st.stages[0].p[0] == 3.2);
  CHECK(st.stages[0].gain == 84.0);
  CHECK(st.stages[1].mu[0] == 25.0);
  CHECK(st.stages[1].gain == 580.0);

  // stage-count mismatch against the plant chain is an error
  TaskBundle wrong = b;
  wrong.controller.stages.pop_back();
  CHECK_THROWS_AS(build_stack(wrong, maglev_reference_tube(), {{1.0}, {0.0}, {9.8}}),
                  Error);

  // scalar stage entries broadcast across output dimensions
  TaskBundle d;
  d.task.horizon = 20.0;
  d.controller.auto_stages = false;
  d.controller.stage1_gain = 0.1;
  StageConfig sc;
  sc.p = {2.0};
  sc.q = {1.0};
  sc.mu = {0.15};
  sc.gain = 20.0;
  d.controller.stages.push_back(sc);
  ControllerStack ds = build_stack(d, drone_reference_tube(),
                                   {{2.875, 2.875, 0.125}, {0.0, 0.0, 0.0}});
  REQUIRE(ds.stages.size() == 1);
  REQUIRE(ds.stages[0].p.size() == 3);
  CHECK(ds.stages[0].p[2] == 2.0);
  CHECK(ds.stages[0].q[1] == 1.0);

  // a bare task document is a bundle with defaults
  TaskBundle plain = parse_bundle(task_json(maglev_reference_task()));
  CHECK(plain.controller.auto_stages);
  CHECK(plain.synthesis.degree == 2);
  CHECK(plain.simulation.plant.empty());
}

TEST_CASE("synthesis reports round-trip through parse") {
  SynthesisReport r;
  r.eta_star = -0.41250000000000003;
  r.eta_dim = {-0.5, -0.4125};
  r.optimal = true;
  r.polished = true;
  r.samples = 1234;
  r.lp_solves = 77;
  r.nodes = 9;
  r.improvement_rounds = 4;
  r.wall_ms = 123.456;
  r.max_violation = 1.25e-13;
  r.assignment_histogram = {10, 0, 3, 7};
  r.manifest = "0123456789abcdef";

  SynthesisReport back = parse_synthesis_report(synthesis_report_json(r));
  CHECK(same_bits(back.eta_star, r.eta_star));
  CHECK(back.eta_dim == r.eta_dim);
  CHECK(back.optimal == r.optimal);
  CHECK(back.budget_exhausted == r.budget_exhausted);
  CHECK(back.polished == r.polished);
  CHECK(back.samples == r.samples);
  CHECK(back.lp_solves == r.lp_solves);
  CHECK(back.nodes == r.nodes);
  CHECK(back.improvement_rounds == r.improvement_rounds);
  CHECK(same_bits(back.wall_ms, r.wall_ms));
  CHECK(same_bits(back.max_violation, r.max_violation));
  CHECK(back.assignment_histogram == r.assignment_histogram);
  CHECK(back.manifest == r.manifest);
}

TEST_CASE("certificate documents round-trip and expose their inputs") {
  CertificateDoc d;
  d.certificate = check_certificate(-0.1, 6.1, 0.0005);
  d.L_L = 2.93;
  d.L_U = 3.17;
  d.method = "weibull";
  d.oracle_violations = 0;
  d.oracle_pass = true;
  d.pass = true;
  d.manifest = "feedfacefeedface";

  std::string text = certificate_doc_json(d);
  CertificateDoc back = parse_certificate_doc(text);
  CHECK(same_bits(back.certificate.margin, d.certificate.margin));
  CHECK(back.certificate.pass == d.certificate.pass);
  CHECK(back.L_L == 2.93);
  CHECK(back.method == "weibull");
  CHECK(back.oracle_pass);
  CHECK(back.pass);
  CHECK(back.manifest == d.manifest);

  double eta = 0, L = 0, eps = 0;
  REQUIRE(parse_certificate_inputs(text, eta, L, eps));
  CHECK(eta == -0.1);
  CHECK(L == 6.1);
  CHECK(eps == 0.0005);

  CHECK_FALSE(parse_certificate_inputs(R"({"L": 6.1})", eta, L, eps));
}

TEST_CASE("manifest hash covers the configuration, not the timings") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");

  RunManifest m;
  m.tool = "stt 0.1.0";
  m.task_path = "tasks/maglev.json";
  m.task_hash = hex64(fnv1a64("task body"));
  m.epsilon = 0.05;
  m.degree = 2;
  m.strategy = "exact";
  m.seed = 1;

  std::string h = manifest_hash(m);
  CHECK(h.size() == 16);

  RunManifest timed = m;
  timed.timings.push_back({"net", 12.0});
  timed.timings.push_back({"synth", 3456.0});
  CHECK(manifest_hash(timed) == h);  // same setup, same hash

  RunManifest other = m;
  other.seed = 2;
  CHECK(manifest_hash(other) != h);

  std::string doc = manifest_json(timed);
  CHECK(doc.find(h) != std::string::npos);
  CHECK(doc.find("synth") != std::string::npos);
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("heuristic") == Strategy::Heuristic);
  CHECK(parse_strategy("exact") == Strategy::ExactBnB);
  CHECK(parse_strategy("exact-bnb") == Strategy::ExactBnB);
  CHECK(parse_strategy(strategy_name(Strategy::Heuristic)) == Strategy::Heuristic);
  CHECK(parse_strategy(strategy_name(Strategy::ExactBnB)) == Strategy::ExactBnB);
  CHECK_THROWS_AS(parse_strategy("simplex"), Error);
}

TEST_CASE("file io round-trips and reports failures") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "stt_serialize_io.json").string();
  write_file(path, "{\"horizon\": 5}\n");
  CHECK(read_file(path) == "{\"horizon\": 5}\n");

  TubeDoc doc;
  doc.tube = robot_reference_tube();
  write_file(path, tube_json(doc));
  TubeDoc back = load_tube(path);
  CHECK(back.tube.dim() == 2);
  CHECK(back.tube.lower[0].coeffs[1] == 0.2377);
  fs::remove(path);

  CHECK_THROWS_AS(read_file(path), Error);
  CHECK_THROWS_AS(write_file("/nonexistent-dir/x.json", "x"), Error);
  CHECK_THROWS_AS(load_bundle(path), Error);

  // bundles loaded from disk pick up the file stem as a fallback name
  const std::string bpath = (fs::temp_directory_path() / "corridor9.json").string();
  TRasTask t = random_box_field_task(4);
  t.name.clear();
  write_file(bpath, task_json(t));
  CHECK(load_bundle(bpath).task.name == "corridor9");
  fs::remove(bpath);
}
