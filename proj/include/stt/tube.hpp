#pragma once

#include <cstddef>
#include <vector>

#include "stt/task.hpp"

namespace stt {

struct BasisSpec {
  int degree = 2;  // monomial basis t^0..t^degree, degree >= 1
  std::size_t coeff_count() const { return std::size_t(degree) + 1; }
};

enum class Side { Lower, Upper };

struct BoundaryCurve {
  std::vector<double> coeffs;  // ascending monomial

  double eval(double t) const { return poly_eval(coeffs, t); }
  double derivative(double t) const { return poly_eval(poly_derivative(coeffs), t); }
};

struct Tube {
  BasisSpec basis;
  double horizon = 0.0;
  std::vector<BoundaryCurve> lower, upper;  // one curve per dimension

  std::size_t dim() const { return lower.size(); }
  const BoundaryCurve& curve(std::size_t i, Side s) const {
    return s == Side::Lower ? lower[i] : upper[i];
  }

  double eval(std::size_t i, Side s, double t) const { return curve(i, s).eval(t); }
  double eval_derivative(std::size_t i, Side s, double t) const {
    return curve(i, s).derivative(t);
  }

  // Exact max of |gamma'| over [0, horizon] for one side, max across dims.
  double analytic_lipschitz(Side s) const;
};

struct SttViolation {
  enum class Kind { Workspace, Start, Goal, Obstacle, Width };
  Kind kind;
  std::size_t dim = 0;
  double t = 0.0;
  int piece = -1;        // unsafe piece index for Kind::Obstacle
  double value = 0.0;    // measured quantity
  double bound = 0.0;    // what it had to clear
};

struct SttCheckReport {
  std::size_t violations = 0;            // total count
  std::vector<SttViolation> sample;      // first few, for diagnostics
  std::size_t time_steps = 0;
  std::size_t edge_steps = 0;
  bool pass() const { return violations == 0; }
};

// Brute-force oracle for the tube conditions against a task:
//  - containment in the workspace and the width floor on a dense time grid
//    (equality counts as a violation),
//  - start/goal box faces at t = 0 / t = horizon (closed containment, with
//    `endpoint_tol` slack for coefficient round-off),
//  - no closed-box overlap with any active unsafe piece, checked on per-piece
//    grids subdivided `edge_steps` times finer than the global grid.
SttCheckReport check_stt(const Tube& tube, const TRasTask& task,
                         std::size_t time_steps = 5000, std::size_t edge_steps = 50,
                         double endpoint_tol = 1e-9, std::size_t max_recorded = 32);

}  // namespace stt
