#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stt/lp.hpp"
#include "support/lp_oracle.hpp"
#include "support/lp_random.hpp"

using namespace stt;
using namespace testsupport;

TEST_CASE("free variable pushed against a single inequality") {
  LinearProgram lp;
  lp.nvars = 1;
  lp.c = {1.0};
  lp.ineq.push_back({{-1.0}, -3.0});  // x >= 3
  auto s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.max_residual <= 1e-7);
}

TEST_CASE("margin variable settles at the binding literal") {
  // min eta  s.t.  1 - eta <= 0,  -eta <= 0   (eta free)
  LinearProgram lp;
  lp.nvars = 1;
  lp.c = {1.0};
  lp.ineq.push_back({{-1.0}, -1.0});
  lp.ineq.push_back({{-1.0}, 0.0});
  auto s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("equality row with box bounds") {
  LinearProgram lp;
  lp.nvars = 2;
  lp.c = {1.0, 2.0};
  lp.eq.push_back({{1.0, 1.0}, 2.0});
  lp.lo = {0.0, 0.0};
  lp.hi = {5.0, 5.0};
  auto s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.x[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("contradictory rows are reported infeasible") {
  LinearProgram lp;
  lp.nvars = 1;
  lp.c = {0.0};
  lp.ineq.push_back({{1.0}, -1.0});   // x <= -1
  lp.ineq.push_back({{-1.0}, -1.0});  // x >= 1
  CHECK(lp_solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("missing upper bound on an improving ray is unbounded") {
  LinearProgram lp;
  lp.nvars = 1;
  lp.c = {-1.0};
  lp.lo = {0.0};
  lp.hi = {kLpInf};
  CHECK(lp_solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("row order does not change the optimum") {
  LinearProgram lp;
  lp.nvars = 2;
  lp.c = {-1.0, -1.0};
  lp.lo = {0.0, 0.0};
  lp.hi = {kLpInf, kLpInf};
  lp.ineq.push_back({{2.0, 1.0}, 4.0});
  lp.ineq.push_back({{1.0, 3.0}, 6.0});
  lp.ineq.push_back({{1.0, 0.0}, 1.8});
  auto a = lp_solve(lp);
  std::reverse(lp.ineq.begin(), lp.ineq.end());
  auto b = lp_solve(lp);
  REQUIRE(a.status == LpStatus::Optimal);
  REQUIRE(b.status == LpStatus::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("badly scaled rows survive equilibration") {
  LinearProgram lp;
  lp.nvars = 2;
  lp.c = {1.0, 1.0};
  lp.lo = {-10.0, -10.0};
  lp.hi = {10.0, 10.0};
  lp.ineq.push_back({{-1e6, 0.0}, -2e6});    // x0 >= 2
  lp.ineq.push_back({{0.0, -1e-6}, -3e-6});  // x1 >= 3
  auto s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(s.max_residual <= 1e-7);
}

TEST_CASE("random boxed LPs agree with the vertex-enumeration oracle") {
  std::size_t optimal = 0, infeasible = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    LinearProgram lp = random_lp(seed);
    OracleResult want = lp_vertex_oracle(lp);
    LpSolution got = lp_solve(lp);
    if (want.feasible) {
      ++optimal;
      REQUIRE(got.status == LpStatus::Optimal);
      CHECK(std::abs(got.objective - want.objective) <=
            1e-7 * (1.0 + std::abs(want.objective)));
      // substitution residual is recomputed from the original rows
      CHECK(got.max_residual <= 1e-7);
      for (std::size_t j = 0; j < lp.nvars; ++j) {
        CHECK(got.x[j] >= lp.lo[j] - 1e-8);
        CHECK(got.x[j] <= lp.hi[j] + 1e-8);
      }
      // weak duality: the dual bound never exceeds the primal value
      CHECK(got.dual_objective <= got.objective + 1e-6 * (1.0 + std::abs(got.objective)));
      CHECK(got.dual_infeasibility <= 1e-6);
    } else {
      ++infeasible;
      REQUIRE(got.status == LpStatus::Infeasible);
    }
  }
  // the generator must exercise both outcomes
  CHECK(optimal >= 50);
  CHECK(infeasible >= 10);
}
