#pragma once

// Reference boundary-curve coefficient sets for the four benchmark case
// studies, with the matching task geometry. Coefficients are printed at
// 4-decimal precision in the source material, so endpoint reproductions
// carry round-off at the few-1e-3 level (worse where the horizon is long).

#include "stt/task.hpp"
#include "stt/tube.hpp"

namespace testsupport {

inline stt::Tube make_tube(int degree, double horizon,
                           std::vector<std::vector<double>> lower,
                           std::vector<std::vector<double>> upper) {
  stt::Tube t;
  t.basis.degree = degree;
  t.horizon = horizon;
  for (auto& c : lower) t.lower.push_back({std::move(c)});
  for (auto& c : upper) t.upper.push_back({std::move(c)});
  return t;
}

// --- mobile robot, first case: [1,1.5]x[2,2.5] -> [4.5,5]x[4.5,5] in 5s
inline stt::Tube robot_reference_tube() {
  return make_tube(2, 5.0,
                   {{1.0, 0.2377, 0.0925}, {2.0, -1.9782, 0.4956}},
                   {{1.5, -0.0023, 0.1405}, {2.5, -2.2183, 0.5437}});
}

inline stt::TRasTask robot_reference_task() {
  stt::TRasTask t;
  t.name = "robot-reference";
  t.dimension = 2;
  t.workspace = {{0.0, 0.0}, {5.1, 5.1}};
  t.initial = {{1.0, 2.0}, {1.5, 2.5}};
  t.target = {{4.5, 4.5}, {5.0, 5.0}};
  t.horizon = 5.0;
  t.min_width = {0.1, 0.1};
  return t;
}

// --- 2R manipulator: joint-space corridor (pi/6, 0) -> (5pi/6, 0) in 5s
inline stt::Tube scara_reference_tube() {
  return make_tube(2, 5.0,
                   {{0.3236, -0.0893, 0.1016}, {-0.2002, 1.4496, -0.2899}},
                   {{0.7236, -0.3293, 0.1496}, {0.2, 1.2097, -0.2419}});
}

// --- magnetic levitation: stay near 1 while the window [1.5,3.5] forbids [0,3]
inline stt::Tube maglev_reference_tube() {
  return make_tube(2, 5.0,
                   {{0.75, 2.7167, -0.5433}},
                   {{1.25, 2.6447, -0.5289}});
}

inline stt::TRasTask maglev_reference_task() {
  stt::TRasTask t;
  t.name = "maglev-reference";
  t.dimension = 1;
  t.workspace = {{0.0}, {5.0}};
  t.initial = {{0.75}, {1.25}};
  t.target = {{0.75}, {1.25}};
  t.horizon = 5.0;
  t.min_width = {0.1};
  stt::TimedRegion r;
  r.active_lo = 1.5;
  r.active_hi = 3.5;
  r.lower_poly = {{0.0}};
  r.upper_poly = {{3.0}};
  t.unsafe.pieces.push_back(r);
  return t;
}

// --- drone: [2.75,3]^2x[0,0.25] -> [0,0.25]^3 in 20s
inline stt::Tube drone_reference_tube() {
  return make_tube(2, 20.0,
                   {{2.75, -0.0296, -0.0054},
                    {2.75, -0.1336, -0.0002},
                    {0.0, 1.9175, -0.0959}},
                   {{3.0, -0.0396, -0.0049},
                    {3.0, -0.1436, 0.0003},
                    {0.25, 1.9075, -0.0954}});
}

}  // namespace testsupport
