#include "stt/tube.hpp"

#include <algorithm>
#include <cmath>

#include "stt/error.hpp"

namespace stt {

double Tube::analytic_lipschitz(Side s) const {
  double L = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    L = std::max(L, poly_max_abs_derivative(curve(i, s).coeffs, 0.0, horizon));
  return L;
}

namespace {

void record(SttCheckReport& rep, SttViolation v, std::size_t max_recorded) {
  ++rep.violations;
  if (rep.sample.size() < max_recorded) rep.sample.push_back(v);
}

}  // namespace

SttCheckReport check_stt(const Tube& tube, const TRasTask& task, std::size_t time_steps,
                         std::size_t edge_steps, double endpoint_tol,
                         std::size_t max_recorded) {
  if (tube.dim() != task.dimension)
    throw Error(Errc::DimensionMismatch, "check_stt: tube/task dimension mismatch");
  if (time_steps < 1 || edge_steps < 1)
    throw Error(Errc::Argument, "check_stt: grid sizes must be >= 1");

  SttCheckReport rep;
  rep.time_steps = time_steps;
  rep.edge_steps = edge_steps;
  const std::size_t n = task.dimension;
  const double tc = task.horizon;
  using Kind = SttViolation::Kind;

  // start / goal faces
  for (std::size_t i = 0; i < n; ++i) {
    struct Face {
      double got, want;
      Kind kind;
      double t;
    } faces[4] = {
        {tube.eval(i, Side::Lower, 0.0), task.initial.lower[i], Kind::Start, 0.0},
        {tube.eval(i, Side::Upper, 0.0), task.initial.upper[i], Kind::Start, 0.0},
        {tube.eval(i, Side::Lower, tc), task.target.lower[i], Kind::Goal, tc},
        {tube.eval(i, Side::Upper, tc), task.target.upper[i], Kind::Goal, tc},
    };
    for (const auto& f : faces)
      if (std::abs(f.got - f.want) > endpoint_tol)
        record(rep, {f.kind, i, f.t, -1, f.got, f.want}, max_recorded);
  }

  // workspace + width floor on the global grid
  const double dt = tc / double(time_steps);
  for (std::size_t k = 0; k <= time_steps; ++k) {
    double t = (k == time_steps) ? tc : dt * double(k);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = tube.eval(i, Side::Lower, t);
      double up = tube.eval(i, Side::Upper, t);
      if (lo - task.workspace.lower[i] <= -endpoint_tol)
        record(rep, {Kind::Workspace, i, t, -1, lo, task.workspace.lower[i]}, max_recorded);
      if (task.workspace.upper[i] - up <= -endpoint_tol)
        record(rep, {Kind::Workspace, i, t, -1, up, task.workspace.upper[i]}, max_recorded);
      if ((up - lo) - task.min_width[i] <= -endpoint_tol)
        record(rep, {Kind::Width, i, t, -1, up - lo, task.min_width[i]}, max_recorded);
    }
  }

  // obstacle clearance: per-piece grids, edge_steps-times finer than global
  for (std::size_t pi = 0; pi < task.unsafe.pieces.size(); ++pi) {
    const auto& p = task.unsafe.pieces[pi];
    double wa = std::max(p.active_lo, 0.0);
    double wb = std::min(p.active_hi, tc);
    if (!(wb >= wa)) continue;
    std::size_t coarse = std::max<std::size_t>(1, std::size_t(std::ceil((wb - wa) / dt)));
    std::size_t fine = coarse * edge_steps;
    double h = (wb - wa) / double(fine);
    for (std::size_t k = 0; k <= fine; ++k) {
      double t = (k == fine) ? wb : wa + h * double(k);
      // closed-box overlap in every dimension == tube touches/intersects piece
      bool overlap = true;
      double worst = -1.0;  // most separated pair, for the report
      std::size_t worst_dim = 0;
      for (std::size_t i = 0; i < n && overlap; ++i) {
        double gl = tube.eval(i, Side::Lower, t);
        double gu = tube.eval(i, Side::Upper, t);
        double ol = poly_eval(p.lower_poly[i], t);
        double ou = poly_eval(p.upper_poly[i], t);
        if (gl > ou || ol > gu) overlap = false;
        double sep = std::max(gl - ou, ol - gu);  // positive when separated
        if (sep > worst) {
          worst = sep;
          worst_dim = i;
        }
      }
      if (overlap) record(rep, {Kind::Obstacle, worst_dim, t, int(pi), worst, 0.0}, max_recorded);
    }
  }
  return rep;
}

}  // namespace stt
