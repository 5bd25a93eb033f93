#include "stt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "stt/error.hpp"
#include "stt/rng.hpp"

namespace stt {

namespace {

struct PieceGeometry {
  double wa = 0.0, wb = 0.0;   // active window clipped to [0, horizon]
  double pitch = 0.0;          // h = 2 eps / s
  std::vector<double> slope;   // per-dim max boundary slope L_i
  bool empty = true;
};

PieceGeometry piece_geometry(const TimedRegion& p, double horizon, double eps) {
  PieceGeometry g;
  g.wa = std::max(p.active_lo, 0.0);
  g.wb = std::min(p.active_hi, horizon);
  if (!(g.wb > g.wa) && g.wb != g.wa) return g;
  const std::size_t n = p.dim();
  g.slope.resize(n);
  double s2 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double L = std::max(poly_max_abs_derivative(p.lower_poly[i], g.wa, g.wb),
                        poly_max_abs_derivative(p.upper_poly[i], g.wa, g.wb));
    g.slope[i] = L;
    double m = std::max(1.0, L);
    s2 += m * m;
  }
  g.pitch = 2.0 * eps / std::sqrt(s2);
  g.empty = false;
  return g;
}

}  // namespace

AugmentedSampleSet build_net(const TRasTask& task, const NetParams& params) {
  if (!(params.epsilon > 0.0)) throw Error(Errc::Argument, "build_net: epsilon must be positive");
  const std::size_t n = task.dimension;
  const double eps = params.epsilon;

  AugmentedSampleSet net;
  net.dimension = n;
  net.epsilon = eps;
  net.horizon = task.horizon;

  std::size_t mt = std::max<std::size_t>(1, std::size_t(std::ceil(task.horizon / (2.0 * eps))));
  net.time_samples.resize(mt + 1);
  for (std::size_t j = 0; j <= mt; ++j)
    net.time_samples[j] = (j == mt) ? task.horizon : task.horizon * double(j) / double(mt);

  std::vector<std::size_t> idx(n);
  std::vector<double> rlo(n), rup(n), base(n), cell(n);
  std::vector<std::uint32_t> dims(n);
  for (std::size_t pi = 0; pi < task.unsafe.pieces.size(); ++pi) {
    const auto& p = task.unsafe.pieces[pi];
    PieceGeometry g = piece_geometry(p, task.horizon, eps);
    if (g.empty) continue;
    double window = g.wb - g.wa;
    std::size_t tcells = std::max<std::size_t>(1, std::size_t(std::ceil(window / g.pitch)));
    double tstep = window / double(tcells);

    for (std::size_t j = 0; j < tcells; ++j) {
      double tr = (window == 0.0) ? g.wa : g.wa + (double(j) + 0.5) * tstep;
      SampleGroup grp;
      grp.piece = int(pi);
      grp.t = tr;
      grp.offset = net.sample_count();
      grp.grid_offset = net.cell_to_sample.size();
      // local grid per slice: the region at tr, grown by its drift over half
      // a pitch, so every region point within the time cell lands on-grid
      std::size_t grid_total = 1;
      for (std::size_t i = 0; i < n; ++i) {
        rlo[i] = poly_eval(p.lower_poly[i], tr);
        rup[i] = poly_eval(p.upper_poly[i], tr);
        double infl = g.slope[i] * 0.5 * g.pitch;
        base[i] = rlo[i] - infl;
        double extent = (rup[i] + infl) - base[i];
        std::uint32_t m = std::uint32_t(std::max(1.0, std::ceil(extent / g.pitch)));
        dims[i] = m;
        cell[i] = extent / double(m);
        if (cell[i] <= 0.0) cell[i] = g.pitch;  // degenerate (point) extent
        net.grid_base.push_back(base[i]);
        net.grid_cell.push_back(cell[i]);
        net.grid_dims.push_back(m);
        grid_total *= m;
      }
      if (net.sample_count() + grid_total > params.max_samples) {
        std::ostringstream os;
        os << "build_net: sample cap " << params.max_samples
           << " exceeded; increase epsilon (currently " << eps << ")";
        throw Error(Errc::NetTooLarge, os.str());
      }
      net.cell_to_sample.resize(net.cell_to_sample.size() + grid_total);
      std::fill(idx.begin(), idx.end(), 0);
      for (std::size_t cellno = 0; cellno < grid_total; ++cellno) {
        net.cell_to_sample[grp.grid_offset + cellno] = std::int32_t(cellno);
        for (std::size_t i = 0; i < n; ++i) {
          double c = base[i] + (double(idx[i]) + 0.5) * cell[i];
          net.ys.push_back(std::clamp(c, rlo[i], rup[i]));
        }
        for (std::size_t i = n; i-- > 0;) {  // odometer, last dim fastest
          if (++idx[i] < dims[i]) break;
          idx[i] = 0;
        }
      }
      grp.count = grid_total;
      net.groups.push_back(grp);
    }
  }
  return net;
}

NetVerifyResult verify_net(const AugmentedSampleSet& net, const TRasTask& task,
                           std::size_t probes, std::uint64_t seed) {
  NetVerifyResult res;
  const std::size_t n = task.dimension;
  std::vector<std::size_t> live;  // pieces with a nonempty clipped window
  for (std::size_t pi = 0; pi < task.unsafe.pieces.size(); ++pi) {
    const auto& p = task.unsafe.pieces[pi];
    if (std::min(p.active_hi, task.horizon) >= std::max(p.active_lo, 0.0))
      live.push_back(pi);
  }
  if (live.empty() || probes == 0) {
    res.pass = true;
    return res;
  }

  // group index sorted by time, per piece
  std::vector<std::vector<std::size_t>> by_piece(task.unsafe.pieces.size());
  for (std::size_t gi = 0; gi < net.groups.size(); ++gi)
    by_piece[std::size_t(net.groups[gi].piece)].push_back(gi);

  std::mt19937_64 rng(seed);
  std::vector<double> y(n);
  std::vector<std::int64_t> c0(n);
  std::vector<std::int64_t> it(n);

  for (std::size_t probe = 0; probe < probes; ++probe) {
    std::size_t pi = live[probe % live.size()];
    const auto& p = task.unsafe.pieces[pi];
    double wa = std::max(p.active_lo, 0.0), wb = std::min(p.active_hi, task.horizon);
    double t = uniform(rng, wa, wb);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = uniform(rng, poly_eval(p.lower_poly[i], t), poly_eval(p.upper_poly[i], t));

    double best2 = std::numeric_limits<double>::infinity();
    const auto& gidx = by_piece[pi];
    // groups ordered by |t - group.t|: expand outward from the closest index
    std::size_t lo = 0, hi = gidx.size();
    std::size_t start = std::size_t(
        std::lower_bound(gidx.begin(), gidx.end(), t,
                         [&](std::size_t g, double tv) { return net.groups[g].t < tv; }) -
        gidx.begin());
    std::int64_t left = std::int64_t(start) - 1, right = std::int64_t(start);
    while (left >= std::int64_t(lo) || right < std::int64_t(hi)) {
      std::size_t gi;
      double dt_left = left >= std::int64_t(lo)
                           ? std::abs(net.groups[gidx[std::size_t(left)]].t - t)
                           : std::numeric_limits<double>::infinity();
      double dt_right = right < std::int64_t(hi)
                            ? std::abs(net.groups[gidx[std::size_t(right)]].t - t)
                            : std::numeric_limits<double>::infinity();
      double dt;
      if (dt_left <= dt_right) {
        gi = gidx[std::size_t(left)];
        dt = dt_left;
        --left;
      } else {
        gi = gidx[std::size_t(right)];
        dt = dt_right;
        ++right;
      }
      if (dt * dt >= best2) {
        if (dt_left >= dt && dt_right >= dt) break;  // both directions exhausted
        continue;
      }
      const SampleGroup& g = net.groups[gi];
      const double* base = net.grid_base.data() + gi * n;
      const double* cell = net.grid_cell.data() + gi * n;
      const std::uint32_t* dims = net.grid_dims.data() + gi * n;
      // expanding window around the probe's cell until provably optimal
      std::vector<std::int64_t> lo_i(n), hi_i(n);
      for (std::int64_t w = 1;; ++w) {
        bool grid_covered = true;
        std::size_t span = 1;
        for (std::size_t i = 0; i < n; ++i) {
          // clamp: the probe can sit off this slice's local grid; the ring
          // bound below stays valid (off-grid only increases distances)
          c0[i] = std::clamp<std::int64_t>(
              std::int64_t(std::floor((y[i] - base[i]) / cell[i])), 0,
              std::int64_t(dims[i]) - 1);
          lo_i[i] = std::max<std::int64_t>(0, c0[i] - w);
          hi_i[i] = std::min<std::int64_t>(std::int64_t(dims[i]) - 1, c0[i] + w);
          if (lo_i[i] > 0 || hi_i[i] < std::int64_t(dims[i]) - 1) grid_covered = false;
          it[i] = lo_i[i];
          span *= std::size_t(hi_i[i] - lo_i[i] + 1);
        }
        for (std::size_t step = 0; step < span; ++step) {
          std::size_t cellno = 0;
          for (std::size_t i = 0; i < n; ++i) cellno = cellno * dims[i] + std::size_t(it[i]);
          std::int32_t local = net.cell_to_sample[g.grid_offset + cellno];
          if (local >= 0) {
            const double* s = net.sample(g, std::size_t(local));
            double d2 = dt * dt;
            for (std::size_t i = 0; i < n; ++i) d2 += (y[i] - s[i]) * (y[i] - s[i]);
            best2 = std::min(best2, d2);
          }
          for (std::size_t i = n; i-- > 0;) {
            if (++it[i] <= hi_i[i]) break;
            it[i] = lo_i[i];
          }
        }
        if (grid_covered) break;
        // any sample outside the window is at least (w * min cell) away spatially
        double ring = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
          ring = std::min(ring, double(w) * cell[i]);
        if (best2 <= ring * ring + dt * dt) break;
      }
    }
    double gap = std::sqrt(best2);
    res.max_gap = std::max(res.max_gap, gap);
  }
  res.probes = probes;
  res.pass = res.max_gap <= net.epsilon * (1.0 + 1e-9);
  return res;
}

void write_net_csv(const AugmentedSampleSet& net, std::ostream& os, const char* manifest_hex) {
  if (manifest_hex) os << "# manifest=" << manifest_hex << "\n";
  os << "t";
  for (std::size_t i = 1; i <= net.dimension; ++i) os << ",y_" << i;
  os << ",piece\n";
  char buf[64];
  for (const auto& g : net.groups) {
    for (std::size_t k = 0; k < g.count; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", g.t);
      os << buf;
      const double* s = net.sample(g, k);
      for (std::size_t i = 0; i < net.dimension; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", s[i]);
        os << ',' << buf;
      }
      os << ',' << g.piece << "\n";
    }
  }
}

}  // namespace stt
