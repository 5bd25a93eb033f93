#pragma once

// Seeded random-LP generator shared by the unit suite and the acceptance
// suite. Always box-bounded so the vertex oracle is exhaustive.

#include <random>

#include "stt/lp.hpp"
#include "stt/rng.hpp"

namespace testsupport {

inline stt::LinearProgram random_lp(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  auto snap = [&](double v) { return std::round(v * 4.0) / 4.0; };  // promote ties
  stt::LinearProgram lp;
  lp.nvars = 1 + std::size_t(g() % 4);
  lp.c.resize(lp.nvars);
  lp.lo.assign(lp.nvars, 0.0);
  lp.hi.assign(lp.nvars, 0.0);
  for (std::size_t j = 0; j < lp.nvars; ++j) {
    lp.c[j] = snap(stt::uniform(g, -2.0, 2.0));
    lp.lo[j] = -5.0 - stt::u01(g);
    lp.hi[j] = 5.0 + stt::u01(g);
  }
  std::size_t rows = 1 + std::size_t(g() % 12);
  for (std::size_t r = 0; r < rows; ++r) {
    stt::LpRow row;
    row.a.resize(lp.nvars);
    for (auto& v : row.a) v = snap(stt::uniform(g, -2.0, 2.0));
    row.rhs = snap(stt::uniform(g, -3.0, 6.0));
    lp.ineq.push_back(std::move(row));
  }
  if (g() % 5 == 0) {
    stt::LpRow row;
    row.a.resize(lp.nvars);
    for (auto& v : row.a) v = snap(stt::uniform(g, -1.5, 1.5));
    row.rhs = snap(stt::uniform(g, -2.0, 4.0));
    lp.eq.push_back(std::move(row));
  }
  return lp;
}

}  // namespace testsupport
