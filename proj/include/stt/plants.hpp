#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "stt/funnel.hpp"
#include "stt/task.hpp"
#include "stt/tube.hpp"

namespace stt {

// Closed-loop benchmark plant. The dynamics stay opaque to the controller;
// g's symmetric part is positive definite on the operating region (the robot
// via its internal heading policy, the maglev via the flux guard).
struct PlantModel {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t output_dim = 0;  // n, also the input dimension
  std::size_t stages = 0;      // N

  // uniform per-channel disturbance bounds, one entry per state channel
  std::vector<double> disturbance_bound;

  // dx = F(x, u, w, t)
  std::function<void(const std::vector<double>&, const std::vector<double>&,
                     const std::vector<double>&, double, std::vector<double>&)>
      dynamics;

  // pure-feedback stage blocks z_1..z_N, each of size output_dim
  std::function<std::vector<std::vector<double>>(const std::vector<double>&)> stage_blocks;

  // min eigenvalue of the symmetric part of the control-effectiveness matrix
  std::function<double(const std::vector<double>&)> effectiveness;

  // clamps the state back into the admissible domain, true when it fired
  std::function<bool(std::vector<double>&)> guard;

  std::vector<double> output(const std::vector<double>& x) const {
    return stage_blocks(x)[0];
  }
};

// The four benchmarks: robot (3 states, 2 outputs, N=1 with the heading
// regulated internally), scara (two-link arm, N=2), maglev (N=3 chain),
// drone (3-D double integrator, N=2). wbar scales every disturbed channel.
PlantModel builtin_plant(const std::string& name, double wbar = 0.05);

struct TrajectoryLog {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> x, y, u;
  std::vector<std::vector<double>> refs;  // r_2..r_N concatenated; empty if N=1
  std::vector<std::vector<double>> tube_lo, tube_up;
  std::vector<bool> contained;  // strict per-step tube membership
  std::size_t guard_steps = 0;
  double min_effectiveness = 0.0;
  bool controller_clamped = false;

  std::size_t steps() const { return t.empty() ? 0 : t.size() - 1; }
};

// One classical fourth-order step of dx = f(x, t), in place.
void rk4_step(
    const std::function<void(const std::vector<double>&, double, std::vector<double>&)>& f,
    std::vector<double>& x, double t, double dt);

// Fixed-step closed-loop run over [0, t_c]. The control law is evaluated at
// every integrator substage; the disturbance is redrawn once per step and
// held. Throws on numerical blowup or an inadmissible start.
TrajectoryLog simulate(const PlantModel& plant, const ControllerStack& stack,
                       const std::vector<double>& x0, double dt, double t_c,
                       std::uint64_t seed);

struct TrasVerdict {
  bool reached = false;    // y(t_c) in the target box
  bool safe = false;       // never in an active unsafe piece, never outside Y
  bool contained = false;  // every step strictly inside the tube
  std::string note;

  bool pass() const { return reached && safe && contained; }
};

TrasVerdict evaluate_tras(const TrajectoryLog& log, const TRasTask& task);

// t, x_*, y_*, u_*, gammaL_*, gammaU_*, contained
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os);

}  // namespace stt
