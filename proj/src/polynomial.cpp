#include "stt/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace stt {

double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {};
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * double(k);
  return d;
}

namespace {

// effective degree: ignore exactly-zero leading coefficients
std::size_t effective_terms(const std::vector<double>& c) {
  std::size_t n = c.size();
  while (n > 0 && c[n - 1] == 0.0) --n;
  return n;
}

double bisect_root(const std::vector<double>& c, double a, double b) {
  double fa = poly_eval(c, a);
  if (fa == 0.0) return a;
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // interval exhausted at double precision
    double fm = poly_eval(c, m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> poly_real_roots(const std::vector<double>& c, double lo, double hi) {
  std::vector<double> roots;
  if (lo > hi) return roots;
  std::size_t terms = effective_terms(c);
  if (terms <= 1) return roots;  // constant: either no roots or everywhere-zero
  if (terms == 2) {
    double r = -c[0] / c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  // stationary points split [lo, hi] into monotone segments
  std::vector<double> knots = poly_real_roots(poly_derivative(c), lo, hi);
  knots.push_back(lo);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double a = knots[i], b = knots[i + 1];
    if (!(b > a)) continue;
    double fa = poly_eval(c, a), fb = poly_eval(c, b);
    if (fa == 0.0) {
      if (roots.empty() || std::abs(roots.back() - a) > 1e-14 * (1.0 + std::abs(a)))
        roots.push_back(a);
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double r = bisect_root(c, a, b);
      if (roots.empty() || std::abs(roots.back() - r) > 1e-14 * (1.0 + std::abs(r)))
        roots.push_back(r);
    } else if (fb == 0.0 && i + 2 == knots.size()) {
      roots.push_back(b);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

Interval poly_range(const std::vector<double>& c, double lo, double hi) {
  Interval r;
  double v = poly_eval(c, lo);
  r.lo = r.hi = v;
  auto consider = [&](double t) {
    double y = poly_eval(c, t);
    r.lo = std::min(r.lo, y);
    r.hi = std::max(r.hi, y);
  };
  consider(hi);
  for (double t : poly_real_roots(poly_derivative(c), lo, hi)) consider(t);
  return r;
}

double poly_max_abs_derivative(const std::vector<double>& c, double lo, double hi) {
  Interval r = poly_range(poly_derivative(c), lo, hi);
  return std::max(std::abs(r.lo), std::abs(r.hi));
}

}  // namespace stt
