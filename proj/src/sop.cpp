#include "stt/sop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <queue>
#include <unordered_map>

#include "stt/error.hpp"
#include "stt/lp.hpp"

namespace stt {

namespace {

constexpr double kViolTol = 1e-8;   // row accepted as satisfied below this
constexpr double kBindTol = 1e-6;   // "within binding" window for reassignment
constexpr double kImproveTol = 1e-9;

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

struct Powers {
  std::vector<double> p;
  Powers(std::size_t z, double t) : p(z) {
    double v = 1.0;
    for (std::size_t k = 0; k < z; ++k, v *= t) p[k] = v;
  }
};

enum class Fam : std::uint8_t { WsLo, WsUp, Width, Obs, Slope };

struct RowKey {
  Fam fam;
  std::uint32_t a = 0;  // time index (Ws/Width/Slope) or unused
  std::uint32_t b = 0;  // dimension, or obstacle sample index (low bits)
  std::uint64_t sample = 0;
  LiteralCode lit = -1;
  std::int8_t sign = 1;  // Slope rows: bound +g' or -g'

  bool operator==(const RowKey& o) const {
    return fam == o.fam && a == o.a && b == o.b && sample == o.sample && lit == o.lit &&
           sign == o.sign;
  }
};

struct ActiveRow {
  RowKey key;
  int idle = 0;
  int born = 0;
};

// Evaluated boundary values for all curves of one tube candidate at one time.
struct CurveVals {
  std::vector<double> lo, up;
};

struct Candidate {
  std::vector<double> x;   // full LP vector
  double eta = 0.0;
  std::vector<double> eta_dim;
};

struct SolveStats {
  std::size_t lp_solves = 0;
};

class LazySolver {
 public:
  LazySolver(const SopInstance& inst, bool polish_mode, double eta_cap)
      : I(inst), polish(polish_mode), cap(eta_cap) {
    n = I.dims();
    z = I.z();
    nv = I.nvars() + (polish ? 2 * n : 0);
    build_sample_groups();
  }

  // polish mode only: pin the margin variables so the row population seen by
  // the pricing scan is stable from one iteration to the next
  void fix_margins(const std::vector<double>& ed) { fixed_eta = ed; }

  // Solves min eta (or min total slope in polish mode) over the SOP rows for
  // the given (possibly partial) assignment, generating violated rows lazily.
  // Returns false on LP infeasibility.
  bool solve(const std::vector<LiteralCode>& asg, Candidate& out, SolveStats& stats) {
    // obstacle rows carried over from a previous assignment only stay valid
    // while that sample still holds the same literal
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [&](const ActiveRow& ar) {
                                return ar.key.fam == Fam::Obs &&
                                       (asg.empty() || asg[ar.key.sample] != ar.key.lit);
                              }),
               rows.end());
    const int max_iter = 200;
    const int no_drop_from = 150;
    for (int iter = 0; iter < max_iter; ++iter) {
      LinearProgram lp = build_lp();
      LpSolution sol = lp_solve(lp);
      ++stats.lp_solves;
      if (sol.status == LpStatus::Infeasible) {
        if (const char* dump = std::getenv("STT_LP_DUMP")) {
          FILE* fp = std::fopen(dump, "w");
          if (fp) {
            std::fprintf(fp, "%zu %zu %zu\n", lp.nvars, lp.ineq.size(), lp.eq.size());
            auto row = [&](const LpRow& r) {
              for (std::size_t j = 0; j < lp.nvars; ++j)
                std::fprintf(fp, "%.17g ", j < r.a.size() ? r.a[j] : 0.0);
              std::fprintf(fp, "%.17g\n", r.rhs);
            };
            for (std::size_t j = 0; j < lp.nvars; ++j) std::fprintf(fp, "%.17g ", lp.c[j]);
            std::fprintf(fp, "\n");
            for (const auto& r : lp.ineq) row(r);
            for (const auto& r : lp.eq) row(r);
            for (std::size_t j = 0; j < lp.nvars; ++j) std::fprintf(fp, "%.17g ", lp.lo[j]);
            std::fprintf(fp, "\n");
            for (std::size_t j = 0; j < lp.nvars; ++j) std::fprintf(fp, "%.17g ", lp.hi[j]);
            std::fprintf(fp, "\n");
            std::fclose(fp);
          }
        }
        return false;
      }
      if (sol.status != LpStatus::Optimal)
        throw Error(Errc::Numerical, "sop: LP solve failed (status " +
                                         std::to_string(int(sol.status)) + ")");
      out.x = sol.x;
      out.eta = sol.x[I.eta_var()];
      out.eta_dim.resize(n);
      for (std::size_t i = 0; i < n; ++i) out.eta_dim[i] = sol.x[I.eta_dim_var(i)];

      std::vector<std::pair<double, RowKey>> found;
      scan_ws_width(out.x, found);
      scan_obstacles(out.x, asg, found);
      if (polish) scan_slopes(out.x, found);
      if (found.empty()) return true;

      age_rows(out.x, iter < no_drop_from);
      add_top(found, iter);
    }
    throw Error(Errc::Numerical, "sop: row generation did not converge");
  }

  const SopInstance& I;
  const bool polish;
  const double cap;  // eta upper bound in polish mode

 private:
  std::size_t n = 0, z = 0, nv = 0;
  std::vector<double> fixed_eta;
  std::vector<ActiveRow> rows;
  std::vector<std::uint32_t> sample_group;  // group index per obstacle sample

  void build_sample_groups() {
    sample_group.resize(I.net->sample_count());
    for (std::size_t gi = 0; gi < I.net->groups.size(); ++gi) {
      const auto& g = I.net->groups[gi];
      for (std::size_t k = 0; k < g.count; ++k)
        sample_group[g.offset + k] = std::uint32_t(gi);
    }
  }

  std::size_t slope_var(std::size_t dim, Side s) const {
    return I.nvars() + dim * 2 + (s == Side::Upper ? 1 : 0);
  }

  void fill_curve_row(std::vector<double>& a, std::size_t dim, Side s, const Powers& pw,
                      double scale) const {
    for (std::size_t k = 0; k < z; ++k) a[I.coeff_var(dim, s, k)] += scale * pw.p[k];
  }

  LpRow make_row(const RowKey& key) const {
    LpRow r;
    r.a.assign(nv, 0.0);
    switch (key.fam) {
      case Fam::WsLo: {  // Y_L - g_L <= eta_i
        Powers pw(z, I.net->time_samples[key.a]);
        fill_curve_row(r.a, key.b, Side::Lower, pw, -1.0);
        r.a[I.eta_dim_var(key.b)] = -1.0;
        r.rhs = -I.task->workspace.lower[key.b];
        break;
      }
      case Fam::WsUp: {  // g_U - Y_U <= eta_i
        Powers pw(z, I.net->time_samples[key.a]);
        fill_curve_row(r.a, key.b, Side::Upper, pw, 1.0);
        r.a[I.eta_dim_var(key.b)] = -1.0;
        r.rhs = I.task->workspace.upper[key.b];
        break;
      }
      case Fam::Width: {  // g_L - g_U + w_i <= eta_i
        Powers pw(z, I.net->time_samples[key.a]);
        fill_curve_row(r.a, key.b, Side::Lower, pw, 1.0);
        fill_curve_row(r.a, key.b, Side::Upper, pw, -1.0);
        r.a[I.eta_dim_var(key.b)] = -1.0;
        r.rhs = -I.task->min_width[key.b];
        break;
      }
      case Fam::Obs: {
        const auto& g = I.net->groups[sample_group[key.sample]];
        Powers pw(z, g.t);
        std::size_t dim = literal_dim(key.lit);
        double y = I.net->ys[key.sample * n + dim];
        if (literal_side(key.lit) == Side::Lower) {  // y - g_L <= eta_i
          fill_curve_row(r.a, dim, Side::Lower, pw, -1.0);
          r.a[I.eta_dim_var(dim)] = -1.0;
          r.rhs = -y;
        } else {  // g_U - y <= eta_i
          fill_curve_row(r.a, dim, Side::Upper, pw, 1.0);
          r.a[I.eta_dim_var(dim)] = -1.0;
          r.rhs = y;
        }
        break;
      }
      case Fam::Slope: {  // +-g'(t) <= m_{i,s}
        double t = I.net->time_samples[key.a];
        std::size_t dim = literal_dim(key.lit);
        Side s = literal_side(key.lit);
        double v = 1.0;
        for (std::size_t k = 1; k < z; ++k) {
          r.a[I.coeff_var(dim, s, k)] = key.sign * double(k) * v;
          v *= t;
        }
        r.a[slope_var(dim, s)] = -1.0;
        r.rhs = 0.0;
        break;
      }
    }
    return r;
  }

  LinearProgram build_lp() const {
    LinearProgram lp;
    lp.nvars = nv;
    lp.c.assign(nv, 0.0);
    if (polish) {
      for (std::size_t i = 0; i < n; ++i) {
        lp.c[slope_var(i, Side::Lower)] = 1.0;
        lp.c[slope_var(i, Side::Upper)] = 1.0;
      }
    } else {
      lp.c[I.eta_var()] = 1.0;
    }
    const double B = I.coeff_bound;
    lp.lo.assign(nv, -B);
    lp.hi.assign(nv, B);
    if (polish) {
      lp.lo[I.eta_var()] = cap;
      lp.hi[I.eta_var()] = cap;
      for (std::size_t i = 0; i < n; ++i) {
        lp.lo[slope_var(i, Side::Lower)] = 0.0;
        lp.lo[slope_var(i, Side::Upper)] = 0.0;
        if (!fixed_eta.empty()) {
          lp.lo[I.eta_dim_var(i)] = fixed_eta[i];
          lp.hi[I.eta_dim_var(i)] = fixed_eta[i];
        }
      }
    }

    const double tc = I.task->horizon;
    Powers p0(z, 0.0), pc(z, tc);
    for (std::size_t i = 0; i < n; ++i) {
      for (Side s : {Side::Lower, Side::Upper}) {
        double s0 = s == Side::Lower ? I.task->initial.lower[i] : I.task->initial.upper[i];
        double sc = s == Side::Lower ? I.task->target.lower[i] : I.task->target.upper[i];
        LpRow r0, rc;
        r0.a.assign(nv, 0.0);
        rc.a.assign(nv, 0.0);
        for (std::size_t k = 0; k < z; ++k) {
          r0.a[I.coeff_var(i, s, k)] = p0.p[k];
          rc.a[I.coeff_var(i, s, k)] = pc.p[k];
        }
        r0.rhs = s0;
        rc.rhs = sc;
        lp.eq.push_back(std::move(r0));
        lp.eq.push_back(std::move(rc));
      }
      LpRow link;  // eta_i <= eta
      link.a.assign(nv, 0.0);
      link.a[I.eta_dim_var(i)] = 1.0;
      link.a[I.eta_var()] = -1.0;
      link.rhs = 0.0;
      lp.ineq.push_back(std::move(link));
    }
    for (const auto& ar : rows) lp.ineq.push_back(make_row(ar.key));
    return lp;
  }

  void eval_curves(const std::vector<double>& x, double t, CurveVals& cv) const {
    cv.lo.resize(n);
    cv.up.resize(n);
    Powers pw(z, t);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = 0.0, up = 0.0;
      for (std::size_t k = 0; k < z; ++k) {
        lo += x[I.coeff_var(i, Side::Lower, k)] * pw.p[k];
        up += x[I.coeff_var(i, Side::Upper, k)] * pw.p[k];
      }
      cv.lo[i] = lo;
      cv.up[i] = up;
    }
  }

  void scan_ws_width(const std::vector<double>& x,
                     std::vector<std::pair<double, RowKey>>& out) const {
    CurveVals cv;
    for (std::uint32_t j = 0; j < I.net->time_samples.size(); ++j) {
      double t = I.net->time_samples[j];
      eval_curves(x, t, cv);
      for (std::uint32_t i = 0; i < n; ++i) {
        double ei = x[I.eta_dim_var(i)];
        double v1 = I.task->workspace.lower[i] - cv.lo[i] - ei;
        double v2 = cv.up[i] - I.task->workspace.upper[i] - ei;
        double v3 = cv.lo[i] - cv.up[i] + I.task->min_width[i] - ei;
        if (v1 > kViolTol) out.push_back({v1, {Fam::WsLo, j, i, 0, -1, 1}});
        if (v2 > kViolTol) out.push_back({v2, {Fam::WsUp, j, i, 0, -1, 1}});
        if (v3 > kViolTol) out.push_back({v3, {Fam::Width, j, i, 0, -1, 1}});
      }
    }
  }

  void scan_obstacles(const std::vector<double>& x, const std::vector<LiteralCode>& asg,
                      std::vector<std::pair<double, RowKey>>& out) const {
    if (asg.empty()) return;
    CurveVals cv;
    // keep only the worst violations; a bounded heap avoids hoarding millions
    const std::size_t keep = 64;
    auto cmp = [](const std::pair<double, RowKey>& a, const std::pair<double, RowKey>& b) {
      return a.first > b.first;
    };
    std::vector<std::pair<double, RowKey>> heap;
    for (const auto& g : I.net->groups) {
      if (g.count == 0) continue;
      eval_curves(x, g.t, cv);
      for (std::size_t k = 0; k < g.count; ++k) {
        std::size_t r = g.offset + k;
        LiteralCode c = asg[r];
        if (c < 0) continue;
        std::size_t dim = literal_dim(c);
        double y = I.net->ys[r * n + dim];
        double v = (literal_side(c) == Side::Lower ? y - cv.lo[dim] : cv.up[dim] - y) -
                   x[I.eta_dim_var(dim)];
        if (v <= kViolTol) continue;
        if (heap.size() < keep) {
          heap.push_back({v, {Fam::Obs, 0, 0, r, c, 1}});
          std::push_heap(heap.begin(), heap.end(), cmp);
        } else if (v > heap.front().first) {
          std::pop_heap(heap.begin(), heap.end(), cmp);
          heap.back() = {v, {Fam::Obs, 0, 0, r, c, 1}};
          std::push_heap(heap.begin(), heap.end(), cmp);
        }
      }
    }
    out.insert(out.end(), heap.begin(), heap.end());
  }

  void scan_slopes(const std::vector<double>& x,
                   std::vector<std::pair<double, RowKey>>& out) const {
    for (std::uint32_t j = 0; j < I.net->time_samples.size(); ++j) {
      double t = I.net->time_samples[j];
      for (std::uint32_t i = 0; i < n; ++i) {
        for (Side s : {Side::Lower, Side::Upper}) {
          double d = 0.0, v = 1.0;
          for (std::size_t k = 1; k < z; ++k) {
            d += double(k) * x[I.coeff_var(i, s, k)] * v;
            v *= t;
          }
          double m = x[slope_var(i, s)];
          LiteralCode code = make_literal(i, s);
          if (d - m > kViolTol) out.push_back({d - m, {Fam::Slope, j, i, 0, code, 1}});
          if (-d - m > kViolTol) out.push_back({-d - m, {Fam::Slope, j, i, 0, code, -1}});
        }
      }
    }
  }

  void age_rows(const std::vector<double>& x, bool allow_drop) {
    for (auto& ar : rows) {
      LpRow r = make_row(ar.key);
      double lhs = 0.0;
      for (std::size_t j = 0; j < nv; ++j) lhs += r.a[j] * x[j];
      if (r.rhs - lhs > 1e-7)
        ++ar.idle;
      else
        ar.idle = 0;
    }
    if (!allow_drop || rows.size() <= 600) return;
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const ActiveRow& ar) { return ar.idle >= 2; }),
               rows.end());
  }

  void add_top(std::vector<std::pair<double, RowKey>>& found, int iter) {
    const std::size_t per_family = 50;
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (const auto& [v, key] : found) {
      auto& c = counts[std::size_t(key.fam)];
      if (c >= per_family) continue;
      bool dup = false;
      for (const auto& ar : rows)
        if (ar.key == key) {
          dup = true;
          break;
        }
      if (dup) continue;
      rows.push_back({key, 0, iter});
      ++c;
    }
  }
};

// --- geometric assignment helpers ---------------------------------------

struct SeedTube {
  // straight lines interpolating the initial box faces to the target faces
  const TRasTask* task;
  double lo(std::size_t i, double t) const {
    double a = task->initial.lower[i], b = task->target.lower[i];
    return a + (b - a) * t / task->horizon;
  }
  double up(std::size_t i, double t) const {
    double a = task->initial.upper[i], b = task->target.upper[i];
    return a + (b - a) * t / task->horizon;
  }
};

// clearance of literal (dim, side): positive when the sample is strictly on
// the cleared side of the curve
template <class LoF, class UpF>
LiteralCode best_literal(const double* y, std::size_t n, const LoF& lo, const UpF& up,
                         double* best_clear = nullptr) {
  LiteralCode best = 0;
  double bc = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double cl = lo(i) - y[i];
    if (cl > bc) {
      bc = cl;
      best = make_literal(i, Side::Lower);
    }
    double cu = y[i] - up(i);
    if (cu > bc) {
      bc = cu;
      best = make_literal(i, Side::Upper);
    }
  }
  if (best_clear) *best_clear = bc;
  return best;
}

class Synth {
 public:
  Synth(const SopInstance& inst, const SynthesisBudget& budget)
      : I(inst), B(budget), solver(inst, false, 0.0) {
    n = I.dims();
    z = I.z();
    start_ms = now_ms();
  }

  SynthesisResult run(Strategy strategy) {
    SynthesisResult res;
    if (strategy == Strategy::Heuristic)
      run_heuristic(res);
    else
      run_bnb(res);

    res.assignment = best_asg;
    res.eta_star = best.eta;
    res.eta_dim = best.eta_dim;
    res.tube = to_tube(best.x);
    res.lp_solves = stats.lp_solves;
    finalize(res);
    return res;
  }

 private:
  const SopInstance& I;
  const SynthesisBudget& B;
  LazySolver solver;
  SolveStats stats;
  std::size_t n = 0, z = 0;
  double start_ms = 0.0;

  Candidate best;
  std::vector<LiteralCode> best_asg;
  bool have_best = false;

  bool out_of_budget() const {
    return stats.lp_solves >= B.max_lp_solves ||
           (now_ms() - start_ms) > B.wall_seconds * 1e3;
  }

  Tube to_tube(const std::vector<double>& x) const {
    Tube t;
    t.basis = I.basis;
    t.horizon = I.task->horizon;
    t.lower.resize(n);
    t.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.lower[i].coeffs.resize(z);
      t.upper[i].coeffs.resize(z);
      for (std::size_t k = 0; k < z; ++k) {
        t.lower[i].coeffs[k] = x[I.coeff_var(i, Side::Lower, k)];
        t.upper[i].coeffs[k] = x[I.coeff_var(i, Side::Upper, k)];
      }
    }
    return t;
  }

  void offer(const Candidate& c, const std::vector<LiteralCode>& asg) {
    if (!have_best || c.eta < best.eta - kImproveTol) {
      best = c;
      best_asg = asg;
      have_best = true;
    }
  }

  // literal value given curve values already evaluated at the sample's time
  double literal_value(std::size_t r, LiteralCode c, const CurveVals& cv) const {
    std::size_t dim = literal_dim(c);
    double y = I.net->ys[r * n + dim];
    return literal_side(c) == Side::Lower ? y - cv.lo[dim] : cv.up[dim] - y;
  }

  std::vector<LiteralCode> greedy_assignment(const Candidate& c,
                                             const std::vector<LiteralCode>* fixed) {
    std::vector<LiteralCode> asg(I.net->sample_count(), -1);
    CurveVals cv;
    LazySolverView view{I, c.x};
    for (const auto& g : I.net->groups) {
      view.eval(g.t, cv);
      for (std::size_t k = 0; k < g.count; ++k) {
        std::size_t r = g.offset + k;
        if (fixed && (*fixed)[r] >= 0) {
          asg[r] = (*fixed)[r];
          continue;
        }
        asg[r] = best_literal(
            I.net->ys.data() + r * n, n, [&](std::size_t i) { return cv.lo[i]; },
            [&](std::size_t i) { return cv.up[i]; });
      }
    }
    return asg;
  }

  struct LazySolverView {  // curve evaluation straight off an LP vector
    const SopInstance& I;
    const std::vector<double>& x;
    void eval(double t, CurveVals& cv) const {
      std::size_t n = I.dims(), z = I.z();
      cv.lo.resize(n);
      cv.up.resize(n);
      Powers pw(z, t);
      for (std::size_t i = 0; i < n; ++i) {
        double lo = 0.0, up = 0.0;
        for (std::size_t k = 0; k < z; ++k) {
          lo += x[I.coeff_var(i, Side::Lower, k)] * pw.p[k];
          up += x[I.coeff_var(i, Side::Upper, k)] * pw.p[k];
        }
        cv.lo[i] = lo;
        cv.up[i] = up;
      }
    }
  };

  // one spec'd improvement pass: samples within the binding window move to
  // their best alternative literal; returns number of changes
  std::size_t reassign_binding(std::vector<LiteralCode>& asg, const Candidate& c,
                               const std::vector<LiteralCode>* fixed) {
    std::size_t changed = 0;
    CurveVals cv;
    LazySolverView view{I, c.x};
    for (const auto& g : I.net->groups) {
      if (g.count == 0) continue;
      view.eval(g.t, cv);
      for (std::size_t k = 0; k < g.count; ++k) {
        std::size_t r = g.offset + k;
        if (fixed && (*fixed)[r] >= 0) continue;
        LiteralCode cur = asg[r];
        if (cur < 0) continue;
        double v = literal_value(r, cur, cv);
        if (v < c.eta_dim[literal_dim(cur)] - kBindTol) continue;
        double bc;
        LiteralCode alt = best_literal(
            I.net->ys.data() + r * n, n, [&](std::size_t i) { return cv.lo[i]; },
            [&](std::size_t i) { return cv.up[i]; }, &bc);
        if (alt != cur && bc > -v) {  // strictly better clearance
          asg[r] = alt;
          ++changed;
        }
      }
    }
    return changed;
  }

  // full assignment -> LP optimum -> binding reassignment until eta stalls
  bool improve_to_fixpoint(std::vector<LiteralCode>& asg, Candidate& c, std::size_t rounds,
                           SynthesisResult* rep) {
    if (!solver.solve(asg, c, stats)) return false;
    offer(c, asg);
    for (std::size_t round = 0; round < rounds; ++round) {
      if (out_of_budget()) {
        if (rep) rep->budget_exhausted = true;
        break;
      }
      std::vector<LiteralCode> next = asg;
      if (reassign_binding(next, c, nullptr) == 0) break;
      Candidate cn;
      if (!solver.solve(next, cn, stats)) break;
      if (rep) ++rep->improvement_rounds;
      bool improved = cn.eta < c.eta - kImproveTol;
      if (cn.eta < c.eta) {
        c = cn;
        asg = std::move(next);
        offer(c, asg);
      }
      if (!improved) break;
    }
    return true;
  }

  void run_heuristic(SynthesisResult& res) {
    SeedTube seed{I.task};
    std::vector<LiteralCode> asg(I.net->sample_count(), -1);
    for (const auto& g : I.net->groups) {
      for (std::size_t k = 0; k < g.count; ++k) {
        std::size_t r = g.offset + k;
        asg[r] = best_literal(
            I.net->ys.data() + r * n, n, [&](std::size_t i) { return seed.lo(i, g.t); },
            [&](std::size_t i) { return seed.up(i, g.t); });
      }
    }
    Candidate c;
    if (!improve_to_fixpoint(asg, c, B.max_improve_rounds, &res))
      throw Error(Errc::NoFeasibleAssignment,
                  "synthesize: endpoint equalities are infeasible under the "
                  "coefficient bounds");
    res.optimal = false;
  }

  struct Node {
    double bound = 0.0;
    std::vector<std::pair<std::size_t, LiteralCode>> fixed;
    Candidate relax;  // bound LP solution
    std::uint64_t seq = 0;
  };

  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
      return a.seq < b.seq;                              // LIFO among ties
    }
  };

  std::vector<LiteralCode> materialize_fixed(const Node& nd) {
    std::vector<LiteralCode> fixed(I.net->sample_count(), -1);
    for (const auto& [r, c] : nd.fixed) fixed[r] = c;
    return fixed;
  }

  void run_bnb(SynthesisResult& res) {
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::uint64_t seq = 0;

    Node root;
    root.seq = seq++;
    {
      std::vector<LiteralCode> none(I.net->sample_count(), -1);
      if (!solver.solve(none, root.relax, stats))
        throw Error(Errc::NoFeasibleAssignment,
                    "synthesize: endpoint equalities are infeasible under the "
                    "coefficient bounds");
      root.bound = root.relax.eta;
    }
    if (I.net->sample_count() == 0) {  // nothing to branch on
      offer(root.relax, {});
      res.optimal = true;
      res.nodes = 1;
      return;
    }
    open.push(std::move(root));

    std::size_t expanded = 0;
    bool exhausted = false;
    while (!open.empty()) {
      if (expanded >= B.max_nodes || out_of_budget()) {
        exhausted = true;
        break;
      }
      Node nd = open.top();
      open.pop();
      if (have_best && nd.bound >= best.eta - kImproveTol) continue;
      ++expanded;

      // incumbent: greedy completion of the node tube, refined briefly
      std::vector<LiteralCode> fixed = materialize_fixed(nd);
      std::vector<LiteralCode> asg = greedy_assignment(nd.relax, &fixed);
      Candidate comp;
      {
        std::vector<LiteralCode> work = asg;
        Candidate c;
        if (solver.solve(work, c, stats)) {
          offer(c, work);
          for (std::size_t round = 0; round < 4 && !out_of_budget(); ++round) {
            std::vector<LiteralCode> next = work;
            if (reassign_binding(next, c, &fixed) == 0) break;
            Candidate cn;
            if (!solver.solve(next, cn, stats)) break;
            ++res.improvement_rounds;
            if (cn.eta >= c.eta - kImproveTol) break;
            c = cn;
            work = std::move(next);
            offer(c, work);
          }
        }
      }
      if (have_best && nd.bound >= best.eta - kImproveTol) continue;  // bound tight

      // branch on the worst-served unfixed sample under the node relaxation
      std::size_t worst = std::size_t(-1);
      double worst_clear = std::numeric_limits<double>::infinity();
      CurveVals cv;
      LazySolverView view{I, nd.relax.x};
      for (const auto& g : I.net->groups) {
        if (g.count == 0) continue;
        view.eval(g.t, cv);
        for (std::size_t k = 0; k < g.count; ++k) {
          std::size_t r = g.offset + k;
          if (fixed[r] >= 0) continue;
          double bc;
          best_literal(
              I.net->ys.data() + r * n, n, [&](std::size_t i) { return cv.lo[i]; },
              [&](std::size_t i) { return cv.up[i]; }, &bc);
          if (bc < worst_clear) {
            worst_clear = bc;
            worst = r;
          }
        }
      }
      if (worst == std::size_t(-1)) continue;  // everything fixed already

      struct Child {
        double value;
        LiteralCode code;
      };
      std::vector<Child> order;
      {
        const auto& g = I.net->groups[group_of(worst)];
        view.eval(g.t, cv);
        for (std::size_t code = 0; code < 2 * n; ++code) {
          double v = literal_value(worst, LiteralCode(code), cv);
          order.push_back({v, LiteralCode(code)});
        }
        std::sort(order.begin(), order.end(),
                  [](const Child& a, const Child& b) { return a.value < b.value; });
      }
      // push least-promising first so ties pop the most promising (higher seq)
      for (std::size_t j = order.size(); j-- > 0;) {
        if (out_of_budget()) {
          exhausted = true;
          break;
        }
        Node child;
        child.fixed = nd.fixed;
        child.fixed.push_back({worst, order[j].code});
        std::vector<LiteralCode> pasg = materialize_fixed(child);
        if (!solver.solve(pasg, child.relax, stats)) continue;
        child.bound = child.relax.eta;
        if (have_best && child.bound >= best.eta - kImproveTol) continue;
        child.seq = seq++;
        open.push(std::move(child));
      }
    }
    res.nodes = expanded;
    res.optimal = !exhausted && have_best;
    res.budget_exhausted = exhausted;
    if (!have_best)
      throw Error(Errc::NoFeasibleAssignment, "synthesize: no assignment produced a tube");
  }

  std::size_t group_of(std::size_t sample) const {
    // groups are laid out consecutively by offset
    std::size_t lo = 0, hi = I.net->groups.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (I.net->groups[mid].offset <= sample)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  // LP vertices meet the endpoint equalities only to solver round-off, which
  // can exceed the oracle's face tolerance; project each curve back onto both
  // faces with an affine shift (second pass absorbs the remaining round-off)
  void snap_endpoints(Tube& tube) const {
    const TRasTask& T = *I.task;
    for (int round = 0; round < 2; ++round)
      for (std::size_t i = 0; i < n; ++i)
        for (Side s : {Side::Lower, Side::Upper}) {
          auto& c = (s == Side::Lower ? tube.lower[i] : tube.upper[i]).coeffs;
          double w0 = s == Side::Lower ? T.initial.lower[i] : T.initial.upper[i];
          double w1 = s == Side::Lower ? T.target.lower[i] : T.target.upper[i];
          double r0 = w0 - poly_eval(c, 0.0);
          double r1 = w1 - poly_eval(c, T.horizon);
          c[0] += r0;
          c[1] += (r1 - r0) / T.horizon;
        }
  }

  void finalize(SynthesisResult& res) {
    res.literal_histogram.assign(2 * n, 0);
    for (LiteralCode c : res.assignment)
      if (c >= 0) ++res.literal_histogram[std::size_t(c)];

    snap_endpoints(res.tube);
    res.max_violation =
        sop_max_violation(I, res.tube, res.eta_dim, res.eta_star, res.assignment);
    if (res.max_violation > 1e-7)
      throw Error(Errc::Numerical, "synthesize: re-verification failed, violation " +
                                       std::to_string(res.max_violation));

    if (B.polish) {
      // secondary LP: hold the margins at their optimum (with a feasibility
      // bump clearing the primal residual), minimize the boundary slopes
      LazySolver ps(I, true, res.eta_star + 2e-8);
      std::vector<double> pinned(res.eta_dim);
      for (double& e : pinned) e += 1e-8;
      ps.fix_margins(pinned);
      Candidate pc;
      SolveStats pstats;
      bool ok = false;
      try {
        ok = ps.solve(res.assignment, pc, pstats);
      } catch (const Error&) {
        ok = false;  // keep the unpolished tube
      }
      stats.lp_solves += pstats.lp_solves;
      res.lp_solves = stats.lp_solves;
      if (ok) {
        Tube cand = to_tube(pc.x);
        snap_endpoints(cand);
        std::vector<double> ed(pc.eta_dim);
        double mv = sop_max_violation(I, cand, ed, res.eta_star, res.assignment);
        if (mv <= 1e-7) {
          res.tube = std::move(cand);
          res.eta_dim = std::move(ed);
          res.max_violation = mv;
          res.polished = true;
        }
      }
    }
    res.wall_ms = now_ms() - start_ms;
  }
};

}  // namespace

SopInstance assemble(const TRasTask& task, const AugmentedSampleSet& net,
                     const BasisSpec& basis) {
  require_valid(task);
  if (basis.degree < 1)
    throw Error(Errc::Argument,
                "assemble: two endpoint equalities per curve need degree >= 1");
  if (net.dimension != task.dimension)
    throw Error(Errc::DimensionMismatch, "assemble: net/task dimension mismatch");
  if (net.horizon != task.horizon)
    throw Error(Errc::DimensionMismatch, "assemble: net horizon differs from task");

  SopInstance inst;
  inst.task = &task;
  inst.net = &net;
  inst.basis = basis;
  double scale = 0.0;
  for (std::size_t i = 0; i < task.dimension; ++i)
    scale = std::max({scale, std::abs(task.workspace.lower[i]),
                      std::abs(task.workspace.upper[i])});
  inst.coeff_bound = 1e3 * std::max(scale, std::pow(task.horizon, basis.degree));
  return inst;
}

SynthesisResult synthesize(const SopInstance& inst, Strategy strategy,
                           const SynthesisBudget& budget) {
  Synth s(inst, budget);
  return s.run(strategy);
}

double sop_max_violation(const SopInstance& inst, const Tube& tube,
                         const std::vector<double>& eta_dim, double eta,
                         const std::vector<LiteralCode>& assignment) {
  const std::size_t n = inst.dims();
  const TRasTask& task = *inst.task;
  double worst = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(tube.eval(i, Side::Lower, 0.0) - task.initial.lower[i]));
    worst = std::max(worst, std::abs(tube.eval(i, Side::Upper, 0.0) - task.initial.upper[i]));
    worst = std::max(worst,
                     std::abs(tube.eval(i, Side::Lower, task.horizon) - task.target.lower[i]));
    worst = std::max(worst,
                     std::abs(tube.eval(i, Side::Upper, task.horizon) - task.target.upper[i]));
    worst = std::max(worst, eta_dim[i] - eta);
  }

  for (double t : inst.net->time_samples) {
    for (std::size_t i = 0; i < n; ++i) {
      double lo = tube.eval(i, Side::Lower, t);
      double up = tube.eval(i, Side::Upper, t);
      worst = std::max(worst, task.workspace.lower[i] - lo - eta_dim[i]);
      worst = std::max(worst, up - task.workspace.upper[i] - eta_dim[i]);
      worst = std::max(worst, lo - up + task.min_width[i] - eta_dim[i]);
    }
  }

  if (!assignment.empty()) {
    std::vector<double> lo(n), up(n);
    for (const auto& g : inst.net->groups) {
      if (g.count == 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = tube.eval(i, Side::Lower, g.t);
        up[i] = tube.eval(i, Side::Upper, g.t);
      }
      for (std::size_t k = 0; k < g.count; ++k) {
        std::size_t r = g.offset + k;
        if (assignment[r] < 0) continue;
        const double* y = inst.net->ys.data() + r * n;
        // the disjunction survives if any literal clears its own margin
        double vmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
          vmin = std::min({vmin, y[i] - lo[i] - eta_dim[i], up[i] - y[i] - eta_dim[i]});
        worst = std::max(worst, vmin);
      }
    }
  }
  return worst;
}

}  // namespace stt
