#include "stt/lp.hpp"

#include <algorithm>
#include <cmath>

#include "stt/error.hpp"

namespace stt {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;

struct StdForm {
  // minimize c.x'  s.t.  A x' (<=|==) b, x' >= 0, after shifting/splitting
  std::size_t nv = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<bool> is_eq;
  double obj_shift = 0.0;

  // mapping back: x_orig[j] = sign[j] * x'[col[j]] + off[j] (+ x'[col2[j]] * -1 for splits)
  struct VarMap {
    std::size_t col = 0, col2 = 0;
    bool split = false;
    double sign = 1.0, off = 0.0;
  };
  std::vector<VarMap> map;
};

StdForm normalize(const LinearProgram& lp) {
  StdForm f;
  const std::size_t n = lp.nvars;
  f.map.resize(n);
  auto lo_of = [&](std::size_t j) { return j < lp.lo.size() ? lp.lo[j] : -kLpInf; };
  auto hi_of = [&](std::size_t j) { return j < lp.hi.size() ? lp.hi[j] : kLpInf; };

  std::size_t cols = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (col, bound) x' <= u
  for (std::size_t j = 0; j < n; ++j) {
    double lo = lo_of(j), hi = hi_of(j);
    auto& m = f.map[j];
    if (std::isfinite(lo)) {
      m.col = cols++;
      m.sign = 1.0;
      m.off = lo;
      if (std::isfinite(hi)) upper_rows.push_back({m.col, hi - lo});
    } else if (std::isfinite(hi)) {
      m.col = cols++;  // x = hi - x'
      m.sign = -1.0;
      m.off = hi;
    } else {
      m.split = true;  // x = x'+ - x'-
      m.col = cols++;
      m.col2 = cols++;
    }
  }
  f.nv = cols;
  f.c.assign(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = f.map[j];
    if (m.split) {
      f.c[m.col] += lp.c[j];
      f.c[m.col2] -= lp.c[j];
    } else {
      f.c[m.col] += lp.c[j] * m.sign;
      f.obj_shift += lp.c[j] * m.off;
    }
  }
  auto push_row = [&](const LpRow& r, bool eq) {
    std::vector<double> a(cols, 0.0);
    double rhs = r.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      double v = j < r.a.size() ? r.a[j] : 0.0;
      if (v == 0.0) continue;
      const auto& m = f.map[j];
      if (m.split) {
        a[m.col] += v;
        a[m.col2] -= v;
      } else {
        a[m.col] += v * m.sign;
        rhs -= v * m.off;
      }
    }
    f.A.push_back(std::move(a));
    f.b.push_back(rhs);
    f.is_eq.push_back(eq);
  };
  for (const auto& r : lp.ineq) push_row(r, false);
  for (const auto& [col, u] : upper_rows) {
    std::vector<double> a(cols, 0.0);
    a[col] = 1.0;
    f.A.push_back(std::move(a));
    f.b.push_back(u);
    f.is_eq.push_back(false);
  }
  for (const auto& r : lp.eq) push_row(r, true);
  return f;
}

struct Tableau {
  std::size_t m = 0, nv = 0, ncols = 0;  // ncols = nv + m slacks + m artificials
  std::vector<double> t;                 // (m) x (ncols + 1), rhs last
  std::vector<double> cost;              // reduced-cost row, ncols + 1 (obj value last)
  std::vector<std::size_t> basis;        // per row: basic column
  std::vector<double> col_scale;

  double& at(std::size_t i, std::size_t j) { return t[i * (ncols + 1) + j]; }
  std::size_t slack(std::size_t i) const { return nv + i; }
  std::size_t art(std::size_t i) const { return nv + m + i; }
};

void build_tableau(const StdForm& f, Tableau& tb) {
  tb.m = f.A.size();
  tb.nv = f.nv;
  tb.ncols = f.nv + 2 * tb.m;
  tb.t.assign(tb.m * (tb.ncols + 1), 0.0);
  tb.basis.assign(tb.m, 0);
  tb.col_scale.assign(f.nv, 1.0);

  // column equilibration over structural columns
  for (std::size_t j = 0; j < f.nv; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < tb.m; ++i) mx = std::max(mx, std::abs(f.A[i][j]));
    if (mx > 0.0) tb.col_scale[j] = 1.0 / mx;
  }
  for (std::size_t i = 0; i < tb.m; ++i) {
    double rmax = std::abs(f.b[i]);
    for (std::size_t j = 0; j < f.nv; ++j)
      rmax = std::max(rmax, std::abs(f.A[i][j]) * tb.col_scale[j]);
    double rs = rmax > 0.0 ? 1.0 / rmax : 1.0;
    double sign = f.b[i] < 0.0 ? -1.0 : 1.0;  // make rhs nonnegative
    for (std::size_t j = 0; j < f.nv; ++j)
      tb.at(i, j) = f.A[i][j] * tb.col_scale[j] * rs * sign;
    tb.at(i, tb.ncols) = f.b[i] * rs * sign;
    if (!f.is_eq[i]) tb.at(i, tb.slack(i)) = sign;  // +-1 slack
    tb.at(i, tb.art(i)) = 1.0;
    // slack is a valid starting basis only for <= rows that kept their sign
    if (!f.is_eq[i] && sign > 0.0)
      tb.basis[i] = tb.slack(i);
    else
      tb.basis[i] = tb.art(i);
  }
}

// reduced-cost row for given column costs (artificials blocked via huge cost none;
// blocking handled by caller masks)
void compute_cost_row(Tableau& tb, const std::vector<double>& c) {
  tb.cost.assign(tb.ncols + 1, 0.0);
  for (std::size_t j = 0; j < tb.ncols; ++j) tb.cost[j] = j < c.size() ? c[j] : 0.0;
  for (std::size_t i = 0; i < tb.m; ++i) {
    double cb = tb.basis[i] < c.size() ? c[tb.basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= tb.ncols; ++j) tb.cost[j] -= cb * tb.at(i, j);
  }
}

void pivot(Tableau& tb, std::size_t pr, std::size_t pc) {
  double pv = tb.at(pr, pc);
  double inv = 1.0 / pv;
  for (std::size_t j = 0; j <= tb.ncols; ++j) tb.at(pr, j) *= inv;
  for (std::size_t i = 0; i < tb.m; ++i) {
    if (i == pr) continue;
    double f = tb.at(i, pc);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= tb.ncols; ++j) tb.at(i, j) -= f * tb.at(pr, j);
    tb.at(i, pc) = 0.0;
  }
  double f = tb.cost[pc];
  if (f != 0.0) {
    for (std::size_t j = 0; j <= tb.ncols; ++j) tb.cost[j] -= f * tb.at(pr, j);
    tb.cost[pc] = 0.0;
  }
  tb.basis[pr] = pc;
}

enum class RunResult { Optimal, Unbounded, IterLimit };

// phase loop; `allowed(j)` gates entering columns
template <typename Allowed>
RunResult run_simplex(Tableau& tb, Allowed allowed, std::size_t max_iters,
                      std::size_t& iters) {
  double last_obj = tb.cost[tb.ncols];
  std::size_t stall = 0;
  const std::size_t stall_limit = std::max<std::size_t>(64, 2 * (tb.m + tb.ncols));
  bool bland = false;
  for (; iters < max_iters; ++iters) {
    // entering column
    std::size_t pc = tb.ncols;
    if (!bland) {
      double best = -kCostTol;
      for (std::size_t j = 0; j < tb.ncols; ++j)
        if (allowed(j) && tb.cost[j] < best) {
          best = tb.cost[j];
          pc = j;
        }
    } else {
      for (std::size_t j = 0; j < tb.ncols; ++j)
        if (allowed(j) && tb.cost[j] < -kCostTol) {
          pc = j;
          break;
        }
    }
    if (pc == tb.ncols) return RunResult::Optimal;
    // ratio test; ties -> smallest basis column (lexicographic-ish, anti-cycling)
    std::size_t pr = tb.m;
    double best_ratio = kLpInf;
    for (std::size_t i = 0; i < tb.m; ++i) {
      double a = tb.at(i, pc);
      if (a <= kPivTol) continue;
      double ratio = tb.at(i, tb.ncols) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && (pr == tb.m || tb.basis[i] < tb.basis[pr]))) {
        best_ratio = ratio;
        pr = i;
      }
    }
    if (pr == tb.m) return RunResult::Unbounded;
    pivot(tb, pr, pc);
    // cost row carries -objective, so progress pushes it upward
    double obj = tb.cost[tb.ncols];
    if (obj > last_obj + 1e-12 * (1.0 + std::abs(last_obj))) {
      last_obj = obj;
      stall = 0;
    } else if (++stall > stall_limit) {
      bland = true;  // cycling suspected
    }
  }
  return RunResult::IterLimit;
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, std::size_t max_iters) {
  if (lp.nvars == 0 || lp.c.size() != lp.nvars)
    throw Error(Errc::Argument, "lp_solve: inconsistent problem dimensions");
  for (const auto& r : lp.ineq)
    if (r.a.size() > lp.nvars) throw Error(Errc::Argument, "lp_solve: row wider than nvars");
  for (const auto& r : lp.eq)
    if (r.a.size() > lp.nvars) throw Error(Errc::Argument, "lp_solve: row wider than nvars");

  StdForm f = normalize(lp);
  Tableau tb;
  build_tableau(f, tb);
  if (max_iters == 0) max_iters = 50 * (tb.m + tb.ncols) + 1000;

  LpSolution sol;
  std::size_t iters = 0;

  // phase 1: minimize sum of artificials
  bool need_phase1 = false;
  for (std::size_t i = 0; i < tb.m; ++i)
    if (tb.basis[i] >= tb.nv + tb.m) need_phase1 = true;
  if (need_phase1) {
    std::vector<double> c1(tb.ncols, 0.0);
    for (std::size_t i = 0; i < tb.m; ++i) c1[tb.art(i)] = 1.0;
    compute_cost_row(tb, c1);
    auto allowed1 = [&](std::size_t j) { return j < tb.nv + tb.m; };  // artificials never re-enter
    RunResult r = run_simplex(tb, allowed1, max_iters, iters);
    sol.iterations = iters;
    if (r == RunResult::IterLimit) {
      sol.status = LpStatus::IterationLimit;
      return sol;
    }
    double phase1 = -tb.cost[tb.ncols];  // cost row holds -objective
    if (phase1 > 1e-7) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // drive leftover artificials out of the basis where possible
    for (std::size_t i = 0; i < tb.m; ++i) {
      if (tb.basis[i] < tb.nv + tb.m) continue;
      std::size_t pc = tb.ncols;
      for (std::size_t j = 0; j < tb.nv + tb.m; ++j)
        if (std::abs(tb.at(i, j)) > kPivTol) {
          pc = j;
          break;
        }
      if (pc != tb.ncols) pivot(tb, i, pc);
      // else: redundant row; harmless to leave the zero-valued artificial basic
    }
  }

  // phase 2
  std::vector<double> c2(tb.ncols, 0.0);
  for (std::size_t j = 0; j < tb.nv; ++j) c2[j] = f.c[j] * tb.col_scale[j];
  compute_cost_row(tb, c2);
  auto allowed2 = [&](std::size_t j) {
    if (j >= tb.nv + tb.m) return false;  // artificials stay out
    return true;
  };
  RunResult r = run_simplex(tb, allowed2, max_iters, iters);
  sol.iterations = iters;
  if (r == RunResult::IterLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  if (r == RunResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // recover x' (scaled standard vars)
  std::vector<double> xs(tb.nv, 0.0);
  for (std::size_t i = 0; i < tb.m; ++i)
    if (tb.basis[i] < tb.nv) xs[tb.basis[i]] = tb.at(i, tb.ncols);
  // undo column scaling, then the bound shifts/splits
  std::vector<double> xstd(f.nv, 0.0);
  for (std::size_t j = 0; j < f.nv; ++j) xstd[j] = xs[j] * tb.col_scale[j];
  sol.x.assign(lp.nvars, 0.0);
  for (std::size_t j = 0; j < lp.nvars; ++j) {
    const auto& m = f.map[j];
    sol.x[j] = m.split ? xstd[m.col] - xstd[m.col2] : m.sign * xstd[m.col] + m.off;
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < lp.nvars; ++j) sol.objective += lp.c[j] * sol.x[j];

  // duals: artificial column i of the cost row carries -y_i (scaled rows)
  // dual feasibility audit: c_std - A_std^T y >= -tol over structural columns,
  // executed in the scaled space where the tableau lives.
  double dual_obj = 0.0;
  double dual_infeas = 0.0;
  {
    std::vector<double> y(tb.m);
    for (std::size_t i = 0; i < tb.m; ++i) y[i] = -tb.cost[tb.art(i)];
    // scaled rhs sits in the tableau only pre-pivot; recompute from f with the
    // same row scaling used in build_tableau
    for (std::size_t i = 0; i < tb.m; ++i) {
      double rmax = std::abs(f.b[i]);
      for (std::size_t j = 0; j < f.nv; ++j)
        rmax = std::max(rmax, std::abs(f.A[i][j]) * tb.col_scale[j]);
      double rs = rmax > 0.0 ? 1.0 / rmax : 1.0;
      double sign = f.b[i] < 0.0 ? -1.0 : 1.0;
      dual_obj += y[i] * f.b[i] * rs * sign;
    }
    for (std::size_t j = 0; j < tb.nv + tb.m; ++j) {
      double red = tb.cost[j];
      bool basic = false;
      for (std::size_t i = 0; i < tb.m; ++i)
        if (tb.basis[i] == j) basic = true;
      if (!basic && red < 0.0) dual_infeas = std::max(dual_infeas, -red);
    }
    dual_obj += f.obj_shift;
  }
  sol.dual_objective = dual_obj;
  sol.dual_infeasibility = dual_infeas;

  // substitution check against the ORIGINAL rows and bounds
  double resid = 0.0;
  auto dot = [&](const LpRow& r) {
    double v = 0.0;
    for (std::size_t j = 0; j < r.a.size(); ++j) v += r.a[j] * sol.x[j];
    return v;
  };
  for (const auto& r : lp.ineq)
    resid = std::max(resid, (dot(r) - r.rhs) / (1.0 + std::abs(r.rhs)));
  for (const auto& r : lp.eq)
    resid = std::max(resid, std::abs(dot(r) - r.rhs) / (1.0 + std::abs(r.rhs)));
  for (std::size_t j = 0; j < lp.nvars; ++j) {
    if (j < lp.lo.size() && std::isfinite(lp.lo[j]))
      resid = std::max(resid, (lp.lo[j] - sol.x[j]) / (1.0 + std::abs(lp.lo[j])));
    if (j < lp.hi.size() && std::isfinite(lp.hi[j]))
      resid = std::max(resid, (sol.x[j] - lp.hi[j]) / (1.0 + std::abs(lp.hi[j])));
  }
  sol.max_residual = std::max(0.0, resid);
  sol.status = sol.max_residual <= 1e-7 ? LpStatus::Optimal : LpStatus::Numerical;
  return sol;
}

}  // namespace stt
