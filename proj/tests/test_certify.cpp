#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stt/certify.hpp"
#include "stt/error.hpp"
#include "stt/sampler.hpp"
#include "stt/sop.hpp"
#include "support/reference_tubes.hpp"
#include "support/task_gen.hpp"

using namespace stt;
using namespace testsupport;

TEST_CASE("certificate margin arithmetic") {
  Certificate a = check_certificate(-0.1, 6.1, 0.0005);
  CHECK(a.margin == doctest::Approx(-0.09695).epsilon(1e-12));
  CHECK(a.pass);

  // -0.0001 + 2.623 * 2e-5; the third-significant-digit value often quoted
  // for this case is a display rounding of the exact product
  Certificate b = check_certificate(-0.0001, 2.623, 0.00002);
  CHECK(std::abs(b.margin - (-4.754e-5)) <= 1e-9);
  CHECK(b.pass);

  Certificate c = check_certificate(0.0, 1.0, 1.0);
  CHECK(c.margin == 1.0);
  CHECK_FALSE(c.pass);

  // positive slack can never be rescued by a small net radius
  CHECK_FALSE(check_certificate(0.05, 0.0, 1e-12).pass);

  CHECK_THROWS_AS(check_certificate(0.0, -1.0, 0.1), Error);
  CHECK_THROWS_AS(check_certificate(0.0, 1.0, 0.0), Error);
}

TEST_CASE("lipschitz combiner") {
  CHECK(combine_lipschitz(2.93, 3.17) == doctest::Approx(6.1).epsilon(1e-12));
  CHECK(combine_lipschitz(1.408, 1.215) == doctest::Approx(2.623).epsilon(1e-12));
  CHECK(combine_lipschitz(0.0, 0.0) == 1.0);
  CHECK(combine_lipschitz(2.0, 0.5) == combine_lipschitz(0.5, 2.0));
  for (double ll : {0.0, 0.7, 2.93})
    for (double lu : {0.0, 1.1, 3.17}) {
      double L = combine_lipschitz(ll, lu);
      CHECK(L >= ll);
      CHECK(L >= lu);
      CHECK(L >= ll + lu);
      CHECK(L >= ll + 1.0);
      CHECK(L >= lu + 1.0);
    }
  CHECK_THROWS_AS(combine_lipschitz(-0.1, 1.0), Error);
}

TEST_CASE("weibull estimator recovers a linear slope") {
  // every chord of 2+3t has slope 3 up to round-off; the fit sees only that
  // noise floor and must still land on 3
  Tube tube = make_tube(1, 5.0, {{2.0, 3.0}}, {{4.0, 3.0}});
  LipschitzEstimate est = estimate_lipschitz_weibull(tube, 0.005, 500, 100, 42);
  CHECK(std::abs(est.L_L - 3.0) <= 0.15);
  CHECK(std::abs(est.L_U - 3.0) <= 0.15);
}

TEST_CASE("constant curve degenerates to the sample-max fallback") {
  Tube tube = make_tube(1, 5.0, {{2.0, 0.0}}, {{4.0, 0.0}});
  LipschitzEstimate est = estimate_lipschitz_weibull(tube, 0.01, 200, 20, 5);
  CHECK(est.degenerate_fallback);
  CHECK(est.L_L == 0.0);
  CHECK(est.L_U == 0.0);
}

TEST_CASE("weibull estimator approaches the slope bound of a quadratic") {
  // gamma(t) = t^2 on [0,5]: slope of a chord is ta + tb < 10
  Tube tube = make_tube(2, 5.0, {{0.0, 0.0, 1.0}}, {{1.0, 0.0, 1.0}});
  LipschitzEstimate est = estimate_lipschitz_weibull(tube, 0.01, 500, 100, 7);
  CHECK_FALSE(est.degenerate_fallback);
  CHECK(est.L_L > 9.5);
  CHECK(est.L_L < 10.5);
  CHECK(est.L_U > 9.5);
  CHECK(est.L_U < 10.5);
}

TEST_CASE("estimator error median shrinks down the resolution ladder") {
  Tube tube = make_tube(2, 5.0, {{0.0, 0.0, 1.0}}, {{1.0, 0.0, 1.0}});
  auto median_err = [&](double alpha, std::size_t nbar, std::size_t m) {
    std::vector<double> errs;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
      LipschitzEstimate est = estimate_lipschitz_weibull(tube, alpha, nbar, m, seed);
      errs.push_back(std::abs(est.L_L - 10.0));
    }
    std::sort(errs.begin(), errs.end());
    return errs[errs.size() / 2];
  };
  double e0 = median_err(0.2, 150, 40);
  double e1 = median_err(0.1, 300, 80);
  double e2 = median_err(0.05, 600, 160);
  CHECK(e1 <= e0 + 1e-9);
  CHECK(e2 <= e1 + 1e-9);
  CHECK(e2 < e0);  // strictly better across the whole ladder
}

TEST_CASE("estimator argument validation") {
  Tube tube = make_tube(1, 5.0, {{2.0, 3.0}}, {{4.0, 3.0}});
  CHECK_THROWS_AS(estimate_lipschitz_weibull(tube, 0.0, 500, 100, 1), Error);
  CHECK_THROWS_AS(estimate_lipschitz_weibull(tube, 0.01, 1, 100, 1), Error);
  CHECK_THROWS_AS(estimate_lipschitz_weibull(tube, 0.01, 500, 9, 1), Error);
}

TEST_CASE("pipeline certifies the corridor synthesis and the oracle agrees") {
  TRasTask task = maglev_reference_task();
  AugmentedSampleSet net = build_net(task, {0.05, std::size_t(1e7)});
  SopInstance inst = assemble(task, net, BasisSpec{2});
  SynthesisResult sr = synthesize(inst, Strategy::ExactBnB);

  CertifyReport rep = certify_pipeline(sr.tube, sr.eta_star, task, net.epsilon);
  CHECK(rep.method == LipschitzMethod::Analytic);
  CHECK(rep.L_L == doctest::Approx(sr.tube.analytic_lipschitz(Side::Lower)));
  double L = combine_lipschitz(rep.L_L, rep.L_U);
  CHECK(rep.certificate.L == doctest::Approx(L));
  CHECK(rep.certificate.margin == doctest::Approx(sr.eta_star + L * 0.05));
  CHECK(rep.certificate.margin <= -0.15);
  CHECK(rep.certificate.pass);
  CHECK(rep.oracle.pass());
  CHECK(rep.pass);

  // certificate conservatism: a hundredfold radius kills the margin while
  // the tube itself still clears everything
  CertifyOptions wide;
  CertifyReport inflated = certify_pipeline(sr.tube, sr.eta_star, task, 5.0, wide);
  CHECK_FALSE(inflated.certificate.pass);
  CHECK(inflated.oracle.pass());
  CHECK_FALSE(inflated.pass);
}

TEST_CASE("pipeline with the statistical estimator on the corridor") {
  TRasTask task = maglev_reference_task();
  AugmentedSampleSet net = build_net(task, {0.05, std::size_t(1e7)});
  SopInstance inst = assemble(task, net, BasisSpec{2});
  SynthesisResult sr = synthesize(inst, Strategy::ExactBnB);

  CertifyOptions opts;
  opts.method = LipschitzMethod::ReverseWeibull;
  opts.seed = 11;
  CertifyReport rep = certify_pipeline(sr.tube, sr.eta_star, task, net.epsilon, opts);
  CHECK(rep.method == LipschitzMethod::ReverseWeibull);
  // statistically estimated constants track the analytic bound from below
  CHECK(rep.L_L <= sr.tube.analytic_lipschitz(Side::Lower) + 1e-6);
  CHECK(rep.L_L >= 0.9 * sr.tube.analytic_lipschitz(Side::Lower));
  CHECK(rep.certificate.pass);
  CHECK(rep.pass);
}

TEST_CASE("certified random fields never trip the oracle") {
  std::size_t certified = 0;
  for (std::uint64_t seed = 1; certified < 8 && seed <= 40; ++seed) {
    TRasTask task = random_box_field_task(seed);
    AugmentedSampleSet net = build_net(task, {0.1, std::size_t(1e7)});
    SopInstance inst = assemble(task, net, BasisSpec{2});
    SynthesisBudget budget;
    budget.max_nodes = 48;
    budget.wall_seconds = 30.0;
    SynthesisResult sr = synthesize(inst, Strategy::ExactBnB, budget);
    if (sr.eta_star >= 0.0) continue;
    CertifyReport rep = certify_pipeline(sr.tube, sr.eta_star, task, net.epsilon);
    if (!rep.certificate.pass) continue;
    ++certified;
    CHECK(rep.oracle.pass());
  }
  CHECK(certified >= 8);
}
