#pragma once

#include <cstdint>
#include <vector>

#include "stt/sampler.hpp"
#include "stt/task.hpp"
#include "stt/tube.hpp"

namespace stt {

// Obstacle-sample literal codes: dim*2 for the lower side (sample must lie
// below gamma_L), dim*2+1 for the upper side (above gamma_U). -1 = unassigned.
using LiteralCode = std::int8_t;

inline LiteralCode make_literal(std::size_t dim, Side side) {
  return LiteralCode(dim * 2 + (side == Side::Upper ? 1 : 0));
}
inline std::size_t literal_dim(LiteralCode c) { return std::size_t(c) / 2; }
inline Side literal_side(LiteralCode c) { return (c & 1) ? Side::Upper : Side::Lower; }

// Decision layout: per dimension i a block [c_{i,L} (z), c_{i,U} (z), eta_i],
// then the global eta last.
struct SopInstance {
  const TRasTask* task = nullptr;
  const AugmentedSampleSet* net = nullptr;
  BasisSpec basis;
  double coeff_bound = 0.0;  // symmetric box on every variable

  std::size_t dims() const { return task->dimension; }
  std::size_t z() const { return basis.coeff_count(); }
  std::size_t block() const { return 2 * z() + 1; }
  std::size_t nvars() const { return dims() * block() + 1; }
  std::size_t coeff_var(std::size_t dim, Side s, std::size_t k) const {
    return dim * block() + (s == Side::Upper ? z() : 0) + k;
  }
  std::size_t eta_dim_var(std::size_t dim) const { return dim * block() + 2 * z(); }
  std::size_t eta_var() const { return dims() * block(); }
};

// Checks degree >= 1 (two endpoint equalities per curve) and sizes the
// coefficient box at 1e3 * max(|Y|, t_c^degree); an unbounded LP would signal
// a modeling hole, not a better tube.
SopInstance assemble(const TRasTask& task, const AugmentedSampleSet& net,
                     const BasisSpec& basis);

enum class Strategy { Heuristic, ExactBnB };

struct SynthesisBudget {
  std::size_t max_nodes = 256;        // branch-and-bound expansions
  std::size_t max_lp_solves = 20000;  // across the whole run
  std::size_t max_improve_rounds = 60;
  double wall_seconds = 240.0;
  bool polish = true;  // secondary slope-minimizing LP at fixed eta*
};

struct SynthesisResult {
  Tube tube;
  double eta_star = 0.0;
  std::vector<double> eta_dim;
  std::vector<LiteralCode> assignment;        // one literal per obstacle sample
  std::vector<std::size_t> literal_histogram;  // counts by literal code
  bool optimal = false;           // ExactBnB exhausted the tree
  bool budget_exhausted = false;  // stopped early, best-so-far returned
  bool polished = false;
  std::size_t lp_solves = 0;
  std::size_t nodes = 0;
  std::size_t improvement_rounds = 0;
  double wall_ms = 0.0;
  double max_violation = 0.0;  // from the full re-verification scan
};

// Resolve the per-sample disjunctions (assignment search) and minimize eta.
// Heuristic: straight-line geometric seed + binding-row reassignment loop.
// ExactBnB: best-first branch-and-bound on literals of the worst-served
// sample, LP relaxation omitting unassigned samples as the bound, greedy
// completion at every node for incumbents. Any returned result has been
// re-verified against every SOP row by direct evaluation.
SynthesisResult synthesize(const SopInstance& inst, Strategy strategy,
                           const SynthesisBudget& budget = {});

// Largest violation over all SOP rows (equalities as |mismatch|) with the
// disjunction evaluated as min over ALL 2n literals against the assigned
// dimension's eta_i. Independent of any LP internals.
double sop_max_violation(const SopInstance& inst, const Tube& tube,
                         const std::vector<double>& eta_dim, double eta,
                         const std::vector<LiteralCode>& assignment);

}  // namespace stt
