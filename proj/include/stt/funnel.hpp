#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stt/tube.hpp"

namespace stt {

// The xi factor's barrier denominator. The source form is the scalar 1 - e'e;
// the componentwise 1 - e_i^2 variant is kept switchable.
enum class XiDenominator { Scalar, Componentwise };

// Exponentially narrowing funnel gamma_i(t) = (p_i - q_i) e^{-mu_i t} + q_i
// for one intermediate stage, with its gain.
struct FunnelSpec {
  std::vector<double> p, q, mu;  // per dimension, p > q > 0, mu >= 0
  double gain = 1.0;

  double width(std::size_t i, double t) const {
    return (p[i] - q[i]) * std::exp(-mu[i] * t) + q[i];
  }
};

struct StageErrors {
  std::vector<double> e;    // normalized error, clamped into the barrier
  std::vector<double> eps;  // log-transformed error
  std::vector<double> xi;   // diagonal of the xi matrix
  bool clamped = false;     // state was at/outside the funnel boundary
};

// Stage-1 tube tracking plus funnels for stages 2..N.
struct ControllerStack {
  Tube tube;
  double stage1_gain = 1.0;
  std::vector<FunnelSpec> stages;  // empty when the input acts on y directly
  double delta = 1e-6;             // clamp margin for the log singularity
  XiDenominator xi_mode = XiDenominator::Scalar;

  std::size_t depth() const { return stages.size() + 1; }
  std::size_t dim() const { return tube.dim(); }
};

struct ControlResult {
  // refs[k] is r_{k+2} for k = 0..N-1; the last entry is the input u
  std::vector<std::vector<double>> refs;
  std::vector<bool> clamped;  // per stage
  bool outside_tube = false;  // any stage clamped

  const std::vector<double>& u() const { return refs.back(); }
};

// e = gamma_d^{-1} (2 x - gamma_s) with gamma_s = gamma_U + gamma_L and
// gamma_d = gamma_U - gamma_L (full width); eps = ln((1+e)/(1-e));
// xi_ii = 4 / (gamma_d,i * barrier denominator).
StageErrors stage1_errors(const std::vector<double>& x1, double t, const Tube& tube,
                          double delta = 1e-6,
                          XiDenominator mode = XiDenominator::Scalar);

// e = (x - r) / gamma_i(t) with the funnel radius playing the half-width
// role (the factor-two asymmetry against stage 1 follows the source).
StageErrors stagek_errors(const std::vector<double>& xk, const std::vector<double>& rk,
                          double t, const FunnelSpec& spec, double delta = 1e-6,
                          XiDenominator mode = XiDenominator::Scalar);

// Sequential cascade r_{k+1} = -kappa_k eps_k(.) xi_k(.): stage 1 tracks the
// tube, each funnel stage tracks the reference from the stage before; the
// final reference is the input. Pure in (states, t); no reference derivative
// is ever needed.
ControlResult control(const ControllerStack& stack,
                      const std::vector<std::vector<double>>& states, double t);

// Auto-selected funnels: p = 1.1 |x_k(0) - r_k(0)| + 0.1, q = 0.05 p,
// mu = 3 / t_c, unit gains. Validates the t = 0 hypotheses.
ControllerStack make_stack(const Tube& tube, const std::vector<std::vector<double>>& z0,
                           double t_c);

// Feasibility at t = 0, for stacks assembled or overridden by hand: the
// output starts strictly inside the tube and every funnel opening exceeds
// its initial deviation. Throws on violation.
void validate_stack(const ControllerStack& stack,
                    const std::vector<std::vector<double>>& z0);

}  // namespace stt
