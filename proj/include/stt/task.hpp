#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "stt/polynomial.hpp"

namespace stt {

struct Box {
  std::vector<double> lower, upper;

  std::size_t dim() const { return lower.size(); }
  double width(std::size_t i) const { return upper[i] - lower[i]; }
  double center(std::size_t i) const { return 0.5 * (lower[i] + upper[i]); }

  bool contains(const std::vector<double>& y, double tol = 0.0) const;
  bool contains(const Box& inner, double tol = 0.0) const;
  bool intersects(const Box& other) const;  // closed boxes, touching counts
};

// One axis-aligned unsafe piece whose corners follow polynomials in t,
// active on [active_lo, active_hi].
struct TimedRegion {
  double active_lo = 0.0, active_hi = 0.0;
  std::vector<std::vector<double>> lower_poly;  // [dim][coeff], ascending
  std::vector<std::vector<double>> upper_poly;

  std::size_t dim() const { return lower_poly.size(); }
  bool active_at(double t) const { return t >= active_lo && t <= active_hi; }
  Box box_at(double t) const;
  bool is_static() const;  // all corner polynomials constant
};

struct UnsafeSet {
  std::vector<TimedRegion> pieces;

  // closed membership: boundary contact counts as inside
  bool contains(double t, const std::vector<double>& y) const;
};

struct TRasTask {
  std::string name;
  std::size_t dimension = 0;
  Box workspace;                  // Y
  Box initial;                    // start box, reached-from set
  Box target;                     // box to hit exactly at the horizon
  double horizon = 0.0;           // t_c
  std::vector<double> min_width;  // per-dimension tube width floor
  UnsafeSet unsafe;
};

// Structural diagnostics; empty result means the task is well-formed.
std::vector<std::string> validate_task(const TRasTask& task);

// Throws Error{InvalidTask} with the joined diagnostics.
void require_valid(const TRasTask& task);

using RegionPredicate = std::function<bool(const std::vector<double>&)>;

// Grid-rectification of a non-box workspace: `inside` describes the true
// workspace within `bounding`. Cells of size <= resolution whose center falls
// outside the predicate are returned as static unsafe boxes. Throws
// Error{ResolutionTooCoarse} when such a cell overlaps `initial`/`target`
// (the grid is too blunt to separate them from the excluded region).
std::vector<Box> workspace_rectify(const Box& bounding, const RegionPredicate& inside,
                                   double resolution, const Box* initial = nullptr,
                                   const Box* target = nullptr);

// Applies workspace_rectify to a task in place: workspace stays the bounding
// box, excluded cells join the unsafe set, active over the whole horizon.
void apply_rectification(TRasTask& task, const RegionPredicate& inside, double resolution);

}  // namespace stt
