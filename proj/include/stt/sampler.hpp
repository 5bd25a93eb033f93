#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stt/task.hpp"

namespace stt {

// Obstacle samples come in groups that share one time value (one group per
// unsafe piece per time cell). Keeping one t per group lets consumers price
// a whole group after a single boundary-curve evaluation.
struct SampleGroup {
  int piece = -1;
  double t = 0.0;
  std::size_t offset = 0;  // first sample, in units of samples
  std::size_t count = 0;
  std::size_t grid_offset = 0;  // into cell_to_sample
};

struct AugmentedSampleSet {
  std::size_t dimension = 0;
  double epsilon = 0.0;
  double horizon = 0.0;

  // 1-D grid on [0, horizon], spacing <= 2*epsilon, used for the
  // workspace/width constraint rows.
  std::vector<double> time_samples;

  std::vector<SampleGroup> groups;
  std::vector<double> ys;  // flat, sample_count() * dimension

  // Per-group spatial grid metadata (flat, groups * dimension each) so the
  // verifier can jump straight to candidate cells near a probe.
  std::vector<double> grid_base;
  std::vector<double> grid_cell;
  std::vector<std::uint32_t> grid_dims;
  std::vector<std::int32_t> cell_to_sample;  // local sample index or -1

  std::size_t sample_count() const { return ys.size() / std::max<std::size_t>(1, dimension); }
  const double* sample(const SampleGroup& g, std::size_t k) const {
    return ys.data() + (g.offset + k) * dimension;
  }
};

struct NetParams {
  double epsilon = 0.01;
  std::size_t max_samples = 10'000'000;
};

// Covering net of W = [0,horizon] x U(t): per piece, a product grid with
// pitch h = 2*eps / sqrt(1 + sum_i max(1, L_i)^2), where L_i is the max
// corner-trajectory slope of that piece on its active window; cell centers
// are clamped into the region at the cell-center time. Every point of W is
// within eps (Euclidean, time + space) of some sample.
AugmentedSampleSet build_net(const TRasTask& task, const NetParams& params);

struct NetVerifyResult {
  double max_gap = 0.0;
  std::size_t probes = 0;
  bool pass = false;  // max_gap <= epsilon (up to float round-off)
};

// Independent covering audit: random probes in W; nearest-sample distance via
// an expanding window over the probe's piece grid. The reported gap is an
// upper bound on the true nearest distance (exact away from clamped borders),
// so a pass is trustworthy and failures are never masked.
NetVerifyResult verify_net(const AugmentedSampleSet& net, const TRasTask& task,
                           std::size_t probes, std::uint64_t seed);

// "t,y_1,...,y_n,piece" rows; optional manifest hash comment line first.
void write_net_csv(const AugmentedSampleSet& net, std::ostream& os,
                   const char* manifest_hex = nullptr);

}  // namespace stt
