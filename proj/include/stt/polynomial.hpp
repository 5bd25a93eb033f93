#pragma once

#include <vector>

namespace stt {

// Dense monomial polynomials, ascending coefficients:
// p(t) = c[0] + c[1]*t + ... + c[d]*t^d.

double poly_eval(const std::vector<double>& c, double t);

std::vector<double> poly_derivative(const std::vector<double>& c);

// All real roots inside [lo, hi], ascending. Found by recursing on the
// derivative (p is monotone between stationary points) + bisection, so no
// external eigensolver is needed; degrees here stay single-digit.
std::vector<double> poly_real_roots(const std::vector<double>& c, double lo, double hi);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Exact range of p over [lo, hi]: extrema occur at interval ends or at
// stationary points, all of which are enumerated.
Interval poly_range(const std::vector<double>& c, double lo, double hi);

// max over [lo, hi] of |p'(t)|
double poly_max_abs_derivative(const std::vector<double>& c, double lo, double hi);

}  // namespace stt
