#pragma once

// Seeded random planar reach-avoid tasks: fixed start/goal corners with a
// small field of static boxes between them.

#include <cstdint>

#include "stt/rng.hpp"
#include "stt/task.hpp"

namespace testsupport {

inline stt::TRasTask random_box_field_task(std::uint64_t seed) {
  std::mt19937_64 g(stt::mix_seed(seed, 77));
  stt::TRasTask t;
  t.name = "boxfield-" + std::to_string(seed);
  t.dimension = 2;
  t.horizon = 5.0;
  t.workspace = {{0.0, 0.0}, {6.0, 6.0}};
  t.initial = {{0.5, 0.5}, {1.0, 1.0}};
  t.target = {{5.0, 5.0}, {5.5, 5.5}};
  t.min_width = {0.1, 0.1};

  auto overlaps = [](const stt::Box& b, double lo0, double hi0, double lo1, double hi1) {
    return !(hi0 < b.lower[0] || lo0 > b.upper[0] || hi1 < b.lower[1] || lo1 > b.upper[1]);
  };

  std::size_t boxes = 1 + g() % 3;
  for (std::size_t k = 0; k < boxes; ++k) {
    double cx, cy, hx, hy;
    for (int attempt = 0;; ++attempt) {
      cx = stt::uniform(g, 1.5, 4.5);
      cy = stt::uniform(g, 1.5, 4.5);
      hx = stt::uniform(g, 0.2, 0.5);
      hy = stt::uniform(g, 0.2, 0.5);
      bool bad = overlaps(t.initial, cx - hx, cx + hx, cy - hy, cy + hy) ||
                 overlaps(t.target, cx - hx, cx + hx, cy - hy, cy + hy);
      if (!bad || attempt > 32) break;
    }
    stt::TimedRegion piece;
    piece.active_lo = 0.0;
    piece.active_hi = t.horizon;
    if (g() % 4 == 0) {  // occasionally a timed window
      double a = stt::uniform(g, 0.0, 2.5);
      piece.active_lo = a;
      piece.active_hi = a + stt::uniform(g, 1.0, 2.5);
    }
    piece.lower_poly = {{cx - hx}, {cy - hy}};
    piece.upper_poly = {{cx + hx}, {cy + hy}};
    t.unsafe.pieces.push_back(piece);
  }
  return t;
}

}  // namespace testsupport
