#include "stt/funnel.hpp"

#include <cmath>
#include <string>

#include "stt/error.hpp"

namespace stt {

namespace {

// Componentwise clamp into [-(1-delta), 1-delta]. Under the scalar barrier
// the sum e'e can still reach 1 with every component interior, so the vector
// is additionally pulled back radially until e'e <= 1-delta.
bool clamp_error(std::vector<double>& e, double delta, XiDenominator mode) {
  bool clamped = false;
  const double lim = 1.0 - delta;
  for (double& v : e) {
    if (v > lim) {
      v = lim;
      clamped = true;
    } else if (v < -lim) {
      v = -lim;
      clamped = true;
    }
  }
  if (mode == XiDenominator::Scalar) {
    double ss = 0.0;
    for (double v : e) ss += v * v;
    if (ss > lim) {
      double s = std::sqrt(lim / ss);
      for (double& v : e) v *= s;
      clamped = true;
    }
  }
  return clamped;
}

// gd[i] is the stage's printed gamma_d convention (full tube width for
// stage 1, funnel radius for stage k).
StageErrors transform(std::vector<double> e, const std::vector<double>& gd,
                      double delta, XiDenominator mode) {
  StageErrors out;
  out.clamped = clamp_error(e, delta, mode);
  const std::size_t n = e.size();
  out.e = std::move(e);
  out.eps.resize(n);
  out.xi.resize(n);
  double ss = 0.0;
  for (double v : out.e) ss += v * v;
  for (std::size_t i = 0; i < n; ++i) {
    out.eps[i] = std::log((1.0 + out.e[i]) / (1.0 - out.e[i]));
    double den = mode == XiDenominator::Scalar ? 1.0 - ss : 1.0 - out.e[i] * out.e[i];
    out.xi[i] = 4.0 / (gd[i] * den);
  }
  return out;
}

void check_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(Errc::Argument, std::string(who) + ": delta must lie in (0,1)");
}

std::vector<double> stage_reference(const StageErrors& se, double gain) {
  std::vector<double> r(se.e.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -gain * se.eps[i] * se.xi[i];
  return r;
}

void check_spec(const FunnelSpec& fs, std::size_t n, std::size_t stage) {
  const std::string who = "funnel stage " + std::to_string(stage);
  if (fs.p.size() != n || fs.q.size() != n || fs.mu.size() != n)
    throw Error(Errc::DimensionMismatch, who + ": parameter vectors must have " +
                                             std::to_string(n) + " entries");
  if (!(fs.gain > 0.0)) throw Error(Errc::Argument, who + ": gain must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(fs.p[i] > fs.q[i] && fs.q[i] > 0.0))
      throw Error(Errc::Argument, who + ": need p > q > 0");
    if (!(fs.mu[i] >= 0.0)) throw Error(Errc::Argument, who + ": need mu >= 0");
  }
}

}  // namespace

StageErrors stage1_errors(const std::vector<double>& x1, double t, const Tube& tube,
                          double delta, XiDenominator mode) {
  check_delta(delta, "stage1_errors");
  const std::size_t n = tube.dim();
  if (x1.size() != n)
    throw Error(Errc::DimensionMismatch, "stage1_errors: state has wrong dimension");
  std::vector<double> e(n), gd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double gl = tube.eval(i, Side::Lower, t);
    double gu = tube.eval(i, Side::Upper, t);
    gd[i] = gu - gl;
    if (!(gd[i] > 0.0))
      throw Error(Errc::Domain,
                  "stage1_errors: tube width nonpositive at t=" + std::to_string(t));
    e[i] = (2.0 * x1[i] - (gu + gl)) / gd[i];
  }
  return transform(std::move(e), gd, delta, mode);
}

StageErrors stagek_errors(const std::vector<double>& xk, const std::vector<double>& rk,
                          double t, const FunnelSpec& spec, double delta,
                          XiDenominator mode) {
  check_delta(delta, "stagek_errors");
  const std::size_t n = xk.size();
  if (rk.size() != n || spec.p.size() != n)
    throw Error(Errc::DimensionMismatch, "stagek_errors: state/reference/spec mismatch");
  std::vector<double> e(n), gd(n);
  for (std::size_t i = 0; i < n; ++i) {
    gd[i] = spec.width(i, t);
    e[i] = (xk[i] - rk[i]) / gd[i];
  }
  return transform(std::move(e), gd, delta, mode);
}

ControlResult control(const ControllerStack& stack,
                      const std::vector<std::vector<double>>& states, double t) {
  const std::size_t N = stack.depth();
  if (states.size() != N)
    throw Error(Errc::DimensionMismatch,
                "control: expected " + std::to_string(N) + " state blocks");

  ControlResult out;
  out.clamped.assign(N, false);
  StageErrors se = stage1_errors(states[0], t, stack.tube, stack.delta, stack.xi_mode);
  out.clamped[0] = se.clamped;
  out.refs.push_back(stage_reference(se, stack.stage1_gain));
  for (std::size_t k = 0; k < stack.stages.size(); ++k) {
    se = stagek_errors(states[k + 1], out.refs.back(), t, stack.stages[k], stack.delta,
                       stack.xi_mode);
    out.clamped[k + 1] = se.clamped;
    out.refs.push_back(stage_reference(se, stack.stages[k].gain));
  }
  for (bool c : out.clamped) out.outside_tube = out.outside_tube || c;
  return out;
}

void validate_stack(const ControllerStack& stack,
                    const std::vector<std::vector<double>>& z0) {
  check_delta(stack.delta, "validate_stack");
  const std::size_t n = stack.dim();
  if (!(stack.stage1_gain > 0.0))
    throw Error(Errc::Argument, "validate_stack: stage-1 gain must be positive");
  if (z0.size() != stack.depth())
    throw Error(Errc::DimensionMismatch, "validate_stack: initial state has " +
                                             std::to_string(z0.size()) +
                                             " blocks, controller expects " +
                                             std::to_string(stack.depth()));
  for (const auto& blk : z0)
    if (blk.size() != n)
      throw Error(Errc::DimensionMismatch, "validate_stack: state block dimension");

  for (std::size_t i = 0; i < n; ++i) {
    double gl = stack.tube.eval(i, Side::Lower, 0.0);
    double gu = stack.tube.eval(i, Side::Upper, 0.0);
    if (!(z0[0][i] > gl && z0[0][i] < gu))
      throw Error(Errc::Domain, "validate_stack: output " + std::to_string(i) +
                                    " does not start strictly inside the tube");
  }

  // walk the reference chain at t = 0 and require every funnel to open
  // wider than its initial deviation
  StageErrors se = stage1_errors(z0[0], 0.0, stack.tube, stack.delta, stack.xi_mode);
  std::vector<double> r = stage_reference(se, stack.stage1_gain);
  for (std::size_t k = 0; k < stack.stages.size(); ++k) {
    const FunnelSpec& fs = stack.stages[k];
    check_spec(fs, n, k + 2);
    for (std::size_t i = 0; i < n; ++i)
      if (!(std::abs(z0[k + 1][i] - r[i]) < fs.p[i]))
        throw Error(Errc::Domain, "validate_stack: stage " + std::to_string(k + 2) +
                                      " starts outside its funnel opening");
    se = stagek_errors(z0[k + 1], r, 0.0, fs, stack.delta, stack.xi_mode);
    r = stage_reference(se, fs.gain);
  }
}

ControllerStack make_stack(const Tube& tube, const std::vector<std::vector<double>>& z0,
                           double t_c) {
  if (z0.empty()) throw Error(Errc::Argument, "make_stack: no state blocks");
  if (!(t_c > 0.0)) throw Error(Errc::Argument, "make_stack: horizon must be positive");

  ControllerStack st;
  st.tube = tube;
  const std::size_t n = tube.dim();
  for (const auto& blk : z0)
    if (blk.size() != n)
      throw Error(Errc::DimensionMismatch, "make_stack: state block dimension");
  for (std::size_t i = 0; i < n; ++i) {
    double gl = tube.eval(i, Side::Lower, 0.0);
    double gu = tube.eval(i, Side::Upper, 0.0);
    if (!(z0[0][i] > gl && z0[0][i] < gu))
      throw Error(Errc::Domain, "make_stack: output " + std::to_string(i) +
                                    " does not start strictly inside the tube");
  }

  StageErrors se = stage1_errors(z0[0], 0.0, tube, st.delta, st.xi_mode);
  std::vector<double> r = stage_reference(se, st.stage1_gain);
  for (std::size_t k = 1; k < z0.size(); ++k) {
    FunnelSpec fs;
    fs.p.resize(n);
    fs.q.resize(n);
    fs.mu.assign(n, 3.0 / t_c);
    for (std::size_t i = 0; i < n; ++i) {
      fs.p[i] = 1.1 * std::abs(z0[k][i] - r[i]) + 0.1;
      fs.q[i] = 0.05 * fs.p[i];
    }
    st.stages.push_back(fs);
    se = stagek_errors(z0[k], r, 0.0, fs, st.delta, st.xi_mode);
    r = stage_reference(se, fs.gain);
  }
  validate_stack(st, z0);
  return st;
}

}  // namespace stt
