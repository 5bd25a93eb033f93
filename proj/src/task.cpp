#include "stt/task.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stt/error.hpp"

namespace stt {

bool Box::contains(const std::vector<double>& y, double tol) const {
  if (y.size() != lower.size()) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (y[i] < lower[i] - tol || y[i] > upper[i] + tol) return false;
  return true;
}

bool Box::contains(const Box& inner, double tol) const {
  if (inner.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (inner.lower[i] < lower[i] - tol || inner.upper[i] > upper[i] + tol) return false;
  return true;
}

bool Box::intersects(const Box& other) const {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (lower[i] > other.upper[i] || other.lower[i] > upper[i]) return false;
  return true;
}

Box TimedRegion::box_at(double t) const {
  Box b;
  b.lower.resize(dim());
  b.upper.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    b.lower[i] = poly_eval(lower_poly[i], t);
    b.upper[i] = poly_eval(upper_poly[i], t);
  }
  return b;
}

bool TimedRegion::is_static() const {
  auto constant = [](const std::vector<double>& c) {
    for (std::size_t k = 1; k < c.size(); ++k)
      if (c[k] != 0.0) return false;
    return true;
  };
  for (const auto& c : lower_poly)
    if (!constant(c)) return false;
  for (const auto& c : upper_poly)
    if (!constant(c)) return false;
  return true;
}

bool UnsafeSet::contains(double t, const std::vector<double>& y) const {
  for (const auto& p : pieces) {
    if (!p.active_at(t)) continue;
    bool in = true;
    for (std::size_t i = 0; i < p.dim() && in; ++i) {
      double v = y[i];
      in = v >= poly_eval(p.lower_poly[i], t) && v <= poly_eval(p.upper_poly[i], t);
    }
    if (in) return true;
  }
  return false;
}

std::vector<std::string> validate_task(const TRasTask& task) {
  std::vector<std::string> diags;
  auto add = [&](const std::string& s) { diags.push_back(s); };
  const std::size_t n = task.dimension;
  if (n == 0) {
    add("dimension must be >= 1");
    return diags;
  }
  auto check_box = [&](const Box& b, const char* what) {
    if (b.lower.size() != n || b.upper.size() != n) {
      std::ostringstream os;
      os << what << ": expected dimension " << n << ", got " << b.lower.size() << "/"
         << b.upper.size();
      add(os.str());
      return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(b.lower[i] < b.upper[i])) {
        std::ostringstream os;
        os << what << ": empty in dimension " << i << " (lower " << b.lower[i]
           << " >= upper " << b.upper[i] << ")";
        add(os.str());
        return false;
      }
    }
    return true;
  };
  bool y_ok = check_box(task.workspace, "workspace");
  bool s_ok = check_box(task.initial, "initial");
  bool t_ok = check_box(task.target, "target");
  if (!(task.horizon > 0.0)) add("horizon must be positive");
  if (task.min_width.size() != n) {
    add("min_width: wrong length");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(task.min_width[i] > 0.0)) {
        std::ostringstream os;
        os << "min_width[" << i << "] must be positive";
        add(os.str());
      } else {
        if (s_ok && task.initial.width(i) < task.min_width[i]) {
          std::ostringstream os;
          os << "min_width[" << i << "] exceeds initial box width ("
             << task.initial.width(i) << ")";
          add(os.str());
        }
        if (t_ok && task.target.width(i) < task.min_width[i]) {
          std::ostringstream os;
          os << "min_width[" << i << "] exceeds target box width ("
             << task.target.width(i) << ")";
          add(os.str());
        }
      }
    }
  }
  if (y_ok && s_ok && !task.workspace.contains(task.initial)) add("initial box not inside workspace");
  if (y_ok && t_ok && !task.workspace.contains(task.target)) add("target box not inside workspace");

  for (std::size_t pi = 0; pi < task.unsafe.pieces.size(); ++pi) {
    const auto& p = task.unsafe.pieces[pi];
    std::ostringstream tag;
    tag << "unsafe[" << pi << "]";
    if (p.dim() != n || p.upper_poly.size() != n) {
      add(tag.str() + ": wrong dimension");
      continue;
    }
    if (!(p.active_lo < p.active_hi)) {
      add(tag.str() + ": empty active window");
      continue;
    }
    if (task.horizon > 0.0 && (p.active_hi <= 0.0 || p.active_lo >= task.horizon)) {
      add(tag.str() + ": active window misses [0, horizon] entirely");
      continue;
    }
    double wa = std::max(p.active_lo, 0.0);
    double wb = task.horizon > 0.0 ? std::min(p.active_hi, task.horizon) : p.active_hi;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.lower_poly[i].empty() || p.upper_poly[i].empty()) {
        add(tag.str() + ": empty corner polynomial");
        continue;
      }
      // width(t) = upper_i(t) - lower_i(t) must stay positive on the window
      std::vector<double> w(std::max(p.lower_poly[i].size(), p.upper_poly[i].size()), 0.0);
      for (std::size_t k = 0; k < p.upper_poly[i].size(); ++k) w[k] += p.upper_poly[i][k];
      for (std::size_t k = 0; k < p.lower_poly[i].size(); ++k) w[k] -= p.lower_poly[i][k];
      if (poly_range(w, wa, wb).lo <= 0.0) {
        std::ostringstream os;
        os << tag.str() << ": degenerate in dimension " << i
           << " (upper <= lower somewhere on the active window)";
        add(os.str());
      }
    }
  }
  return diags;
}

void require_valid(const TRasTask& task) {
  auto diags = validate_task(task);
  if (diags.empty()) return;
  std::string msg = "invalid task";
  if (!task.name.empty()) msg += " '" + task.name + "'";
  msg += ":";
  for (const auto& d : diags) msg += "\n  - " + d;
  throw Error(Errc::InvalidTask, msg);
}

std::vector<Box> workspace_rectify(const Box& bounding, const RegionPredicate& inside,
                                   double resolution, const Box* initial,
                                   const Box* target) {
  if (!(resolution > 0.0)) throw Error(Errc::Argument, "rectify: resolution must be positive");
  const std::size_t n = bounding.dim();
  std::vector<std::size_t> cells(n);
  std::vector<double> step(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    double w = bounding.width(i);
    cells[i] = std::max<std::size_t>(1, std::size_t(std::ceil(w / resolution)));
    step[i] = w / double(cells[i]);
    if (total > 50'000'000 / cells[i])
      throw Error(Errc::Argument, "rectify: grid would exceed 5e7 cells; coarsen resolution");
    total *= cells[i];
  }
  std::vector<Box> out;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> center(n);
  for (std::size_t cell = 0; cell < total; ++cell) {
    Box b;
    b.lower.resize(n);
    b.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      b.lower[i] = bounding.lower[i] + step[i] * double(idx[i]);
      b.upper[i] = b.lower[i] + step[i];
      center[i] = b.lower[i] + 0.5 * step[i];
    }
    if (!inside(center)) {
      if (initial && initial->intersects(b))
        throw Error(Errc::ResolutionTooCoarse,
                    "rectify: excluded cell overlaps the initial box; refine resolution");
      if (target && target->intersects(b))
        throw Error(Errc::ResolutionTooCoarse,
                    "rectify: excluded cell overlaps the target box; refine resolution");
      out.push_back(std::move(b));
    }
    for (std::size_t i = 0; i < n; ++i) {  // odometer
      if (++idx[i] < cells[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

void apply_rectification(TRasTask& task, const RegionPredicate& inside, double resolution) {
  auto boxes =
      workspace_rectify(task.workspace, inside, resolution, &task.initial, &task.target);
  for (const auto& b : boxes) {
    TimedRegion r;
    r.active_lo = 0.0;
    r.active_hi = task.horizon;
    r.lower_poly.resize(b.dim());
    r.upper_poly.resize(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) {
      r.lower_poly[i] = {b.lower[i]};
      r.upper_poly[i] = {b.upper[i]};
    }
    task.unsafe.pieces.push_back(std::move(r));
  }
}

}  // namespace stt
