#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace stt {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

struct LpRow {
  std::vector<double> a;
  double rhs = 0.0;
};

// minimize c.x  subject to  ineq: a.x <= rhs,  eq: a.x == rhs,  lo <= x <= hi
// (bounds may be +-inf; empty lo/hi vectors mean all-free variables).
struct LinearProgram {
  std::size_t nvars = 0;
  std::vector<double> c;
  std::vector<LpRow> ineq;
  std::vector<LpRow> eq;
  std::vector<double> lo, hi;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  std::vector<double> x;
  double objective = 0.0;
  // verification fields: residual is recomputed from the ORIGINAL rows by
  // substitution, duals come from the final basis for a weak-duality audit
  double max_residual = 0.0;
  double dual_objective = 0.0;
  double dual_infeasibility = 0.0;
  std::size_t iterations = 0;
};

// Dense two-phase simplex. Dantzig pricing with an automatic switch to
// Bland's rule when progress stalls; row/column equilibration for the wide
// dynamic range monomial bases produce. max_iters = 0 picks a default.
LpSolution lp_solve(const LinearProgram& lp, std::size_t max_iters = 0);

}  // namespace stt
