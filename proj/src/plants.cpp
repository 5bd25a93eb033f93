#include "stt/plants.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "stt/error.hpp"
#include "stt/rng.hpp"

namespace stt {

namespace {

PlantModel robot_model(double wbar) {
  PlantModel m;
  m.name = "robot";
  m.state_dim = 3;
  m.output_dim = 2;
  m.stages = 1;
  m.disturbance_bound = {wbar, wbar, wbar};
  // planar pose; v enters through the rotation R(x3), the heading is held
  // near zero by omega = -5 x3 so R's symmetric part (cos x3 * I) stays
  // positive definite
  m.dynamics = [](const std::vector<double>& x, const std::vector<double>& u,
                  const std::vector<double>& w, double, std::vector<double>& dx) {
    double c = std::cos(x[2]), s = std::sin(x[2]);
    dx[0] = c * u[0] - s * u[1] + w[0];
    dx[1] = s * u[0] + c * u[1] + w[1];
    dx[2] = -5.0 * x[2] + w[2];
  };
  m.stage_blocks = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{x[0], x[1]}};
  };
  m.effectiveness = [](const std::vector<double>& x) { return std::cos(x[2]); };
  return m;
}

// two-link arm: inertia, velocity and gravity terms with m = l = 1, g = 9.8
void scara_terms(const std::vector<double>& x, double M[3], double C[2], double G[2]) {
  double c1 = std::cos(x[0]), c2 = std::cos(x[1]), s2 = std::sin(x[1]);
  double c12 = std::cos(x[0] + x[1]);
  double w1 = x[2], w2 = x[3];
  M[0] = 5.0 / 3.0 + c2;        // M11
  M[1] = 1.0 / 3.0 + 0.5 * c2;  // M12 = M21
  M[2] = 1.0 / 3.0;             // M22
  C[0] = s2 * (-0.5 * w2 * w2 - w1 * w2);
  C[1] = s2 * (0.5 * w2 * w2);
  G[0] = 9.8 * (1.5 * c1 + 0.5 * c12);
  G[1] = 9.8 * (0.5 * c12);
}

PlantModel scara_model(double wbar) {
  PlantModel m;
  m.name = "scara";
  m.state_dim = 4;
  m.output_dim = 2;
  m.stages = 2;
  m.disturbance_bound = {0.0, 0.0, wbar, wbar};  // d(t) acts with the torque
  m.dynamics = [](const std::vector<double>& x, const std::vector<double>& u,
                  const std::vector<double>& w, double, std::vector<double>& dx) {
    double M[3], C[2], G[2];
    scara_terms(x, M, C, G);
    double r0 = u[0] + w[2] - C[0] - G[0];
    double r1 = u[1] + w[3] - C[1] - G[1];
    double det = M[0] * M[2] - M[1] * M[1];  // 4/9 - cos^2(q2)/4 >= 0.194
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = (M[2] * r0 - M[1] * r1) / det;
    dx[3] = (M[0] * r1 - M[1] * r0) / det;
  };
  m.stage_blocks = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{x[0], x[1]}, {x[2], x[3]}};
  };
  m.effectiveness = [](const std::vector<double>& x) {
    // min eig of M^{-1} = 1 / max eig of M
    double M[3], C[2], G[2];
    scara_terms(x, M, C, G);
    double tr = M[0] + M[2], det = M[0] * M[2] - M[1] * M[1];
    double lmax = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    return 1.0 / lmax;
  };
  return m;
}

PlantModel maglev_model(double wbar) {
  PlantModel m;
  m.name = "maglev";
  m.state_dim = 3;
  m.output_dim = 1;
  m.stages = 3;
  m.disturbance_bound = {0.0, wbar, 0.0};  // load force on the ball
  constexpr double kM = 1.0, kG = 9.8, kR = 10.0, kAlpha = 0.5;
  m.dynamics = [](const std::vector<double>& x, const std::vector<double>& u,
                  const std::vector<double>& w, double, std::vector<double>& dx) {
    double x3 = std::max(x[2], 1e-9);  // flux-squared stays positive
    dx[0] = x[1] / kM;
    dx[1] = x3 / (2.0 * kAlpha) - kM * kG + w[1];
    dx[2] = -(2.0 * kR / kAlpha) * (1.0 - x[0]) * x3 + 2.0 * std::sqrt(x3) * u[0];
  };
  m.stage_blocks = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{x[0]}, {x[1]}, {x[2]}};
  };
  m.effectiveness = [](const std::vector<double>& x) {
    double x3 = std::max(x[2], 1e-9);
    return std::min({1.0 / kM, 1.0 / (2.0 * kAlpha), 2.0 * std::sqrt(x3)});
  };
  m.guard = [](std::vector<double>& x) {
    if (x[2] < 1e-9) {
      x[2] = 1e-9;
      return true;
    }
    return false;
  };
  return m;
}

PlantModel drone_model(double wbar) {
  PlantModel m;
  m.name = "drone";
  m.state_dim = 6;
  m.output_dim = 3;
  m.stages = 2;
  m.disturbance_bound.assign(6, wbar);
  m.dynamics = [](const std::vector<double>& x, const std::vector<double>& u,
                  const std::vector<double>& w, double, std::vector<double>& dx) {
    for (int i = 0; i < 3; ++i) dx[i] = x[i + 3] + w[i];
    for (int i = 0; i < 3; ++i) dx[i + 3] = u[i] + w[i + 3];
  };
  m.stage_blocks = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
  };
  m.effectiveness = [](const std::vector<double>&) { return 1.0; };
  return m;
}

bool inside_box(const std::vector<double>& y, const std::vector<double>& lo,
                const std::vector<double>& hi) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < lo[i] || y[i] > hi[i]) return false;
  return true;
}

}  // namespace

PlantModel builtin_plant(const std::string& name, double wbar) {
  if (!(wbar >= 0.0)) throw Error(Errc::Argument, "builtin_plant: negative bound");
  if (name == "robot") return robot_model(wbar);
  if (name == "scara") return scara_model(wbar);
  if (name == "maglev") return maglev_model(wbar);
  if (name == "drone") return drone_model(wbar);
  throw Error(Errc::UnknownPlant, "builtin_plant: no plant named '" + name + "'");
}

void rk4_step(
    const std::function<void(const std::vector<double>&, double, std::vector<double>&)>& f,
    std::vector<double>& x, double t, double dt) {
  const std::size_t d = x.size();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  f(x, t, k1);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  f(tmp, t + 0.5 * dt, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  f(tmp, t + 0.5 * dt, k3);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + dt * k3[i];
  f(tmp, t + dt, k4);
  for (std::size_t i = 0; i < d; ++i)
    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

TrajectoryLog simulate(const PlantModel& plant, const ControllerStack& stack,
                       const std::vector<double>& x0, double dt, double t_c,
                       std::uint64_t seed) {
  if (!(dt > 0.0) || !(t_c > 0.0))
    throw Error(Errc::Argument, "simulate: dt and t_c must be positive");
  if (x0.size() != plant.state_dim)
    throw Error(Errc::DimensionMismatch, "simulate: state size");
  if (stack.dim() != plant.output_dim || stack.depth() != plant.stages)
    throw Error(Errc::DimensionMismatch, "simulate: controller/plant shape mismatch");

  const std::size_t steps = std::size_t(std::llround(t_c / dt));
  if (steps < 1) throw Error(Errc::Argument, "simulate: horizon shorter than one step");
  const std::size_t n = plant.output_dim;

  std::vector<double> x = x0;
  if (plant.guard) {
    std::vector<double> probe = x;
    if (plant.guard(probe)) throw Error(Errc::Domain, "simulate: x0 outside the domain");
  }
  {
    std::vector<double> y0 = plant.output(x);
    for (std::size_t i = 0; i < n; ++i)
      if (!(y0[i] > stack.tube.eval(i, Side::Lower, 0.0) &&
            y0[i] < stack.tube.eval(i, Side::Upper, 0.0)))
        throw Error(Errc::Domain, "simulate: output must start strictly inside the tube");
  }

  TrajectoryLog log;
  log.dt = dt;
  log.min_effectiveness = std::numeric_limits<double>::infinity();
  log.t.reserve(steps + 1);

  std::mt19937_64 g(mix_seed(seed, 9001));
  std::vector<double> w(plant.state_dim);
  bool clamped = false;
  auto closed_loop = [&](const std::vector<double>& xs, double ts, std::vector<double>& dx) {
    ControlResult cr = control(stack, plant.stage_blocks(xs), ts);
    clamped = clamped || cr.outside_tube;
    plant.dynamics(xs, cr.u(), w, ts, dx);
  };

  auto record = [&](double tk) {
    ControlResult cr = control(stack, plant.stage_blocks(x), tk);
    clamped = clamped || cr.outside_tube;
    log.t.push_back(tk);
    log.x.push_back(x);
    std::vector<double> y = plant.output(x);
    log.u.push_back(cr.u());
    std::vector<double> rcat;
    for (std::size_t k = 0; k + 1 < cr.refs.size(); ++k)
      rcat.insert(rcat.end(), cr.refs[k].begin(), cr.refs[k].end());
    log.refs.push_back(std::move(rcat));
    std::vector<double> lo(n), up(n);
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = stack.tube.eval(i, Side::Lower, tk);
      up[i] = stack.tube.eval(i, Side::Upper, tk);
      inside = inside && y[i] > lo[i] && y[i] < up[i];
    }
    log.tube_lo.push_back(std::move(lo));
    log.tube_up.push_back(std::move(up));
    log.contained.push_back(inside);
    log.y.push_back(std::move(y));
    log.min_effectiveness = std::min(log.min_effectiveness, plant.effectiveness(x));
  };

  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    double tk = dt * double(k);
    for (std::size_t i = 0; i < plant.state_dim; ++i)
      w[i] = uniform(g, -plant.disturbance_bound[i], plant.disturbance_bound[i]);
    rk4_step(closed_loop, x, tk, dt);
    if (plant.guard && plant.guard(x)) ++log.guard_steps;
    for (double v : x)
      if (!std::isfinite(v) || std::abs(v) > 1e12)
        throw Error(Errc::Numerical,
                    "simulate: numerical blowup at t=" + std::to_string(tk + dt));
    record(k + 1 == steps ? t_c : dt * double(k + 1));
  }
  log.controller_clamped = clamped;
  return log;
}

TrasVerdict evaluate_tras(const TrajectoryLog& log, const TRasTask& task) {
  TrasVerdict v;
  if (log.t.empty()) {
    v.note = "empty log";
    return v;
  }
  if (log.t.back() < task.horizon - 1e-9) {
    v.note = "log ends at t=" + std::to_string(log.t.back()) + " before t_c";
    return v;
  }

  v.reached = inside_box(log.y.back(), task.target.lower, task.target.upper);
  if (!v.reached) v.note = "final output outside the target";

  v.safe = true;
  for (std::size_t k = 0; k < log.t.size() && v.safe; ++k) {
    double t = log.t[k];
    if (!inside_box(log.y[k], task.workspace.lower, task.workspace.upper)) {
      v.safe = false;
      v.note = "left the workspace at t=" + std::to_string(t);
    } else if (task.unsafe.contains(t, log.y[k])) {
      v.safe = false;
      v.note = "entered an unsafe piece at t=" + std::to_string(t);
    }
  }

  v.contained = true;
  for (std::size_t k = 0; k < log.contained.size(); ++k)
    if (!log.contained[k]) {
      v.contained = false;
      if (v.note.empty()) v.note = "left the tube at t=" + std::to_string(log.t[k]);
      break;
    }
  return v;
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os) {
  const std::size_t sd = log.x.empty() ? 0 : log.x[0].size();
  const std::size_t n = log.y.empty() ? 0 : log.y[0].size();
  os << "t";
  for (std::size_t i = 0; i < sd; ++i) os << ",x" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",y" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",u" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",gammaL" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",gammaU" << i + 1;
  os << ",contained\n";
  os.precision(17);
  for (std::size_t k = 0; k < log.t.size(); ++k) {
    os << log.t[k];
    for (double v : log.x[k]) os << ',' << v;
    for (double v : log.y[k]) os << ',' << v;
    for (double v : log.u[k]) os << ',' << v;
    for (double v : log.tube_lo[k]) os << ',' << v;
    for (double v : log.tube_up[k]) os << ',' << v;
    os << ',' << (log.contained[k] ? 1 : 0) << '\n';
  }
}

}  // namespace stt
