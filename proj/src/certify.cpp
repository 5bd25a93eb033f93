#include "stt/certify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "stt/error.hpp"
#include "stt/rng.hpp"

namespace stt {

namespace {

// negative log-likelihood of a reverse Weibull with location mu > max(x),
// scale sigma, shape k; data enters via (mu - x_i)
double reverse_weibull_nll(const std::vector<double>& xs, double mu, double sigma, double k) {
  double nll = 0.0;
  for (double x : xs) {
    double d = (mu - x) / sigma;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    nll -= std::log(k) - std::log(sigma) + (k - 1.0) * std::log(d) - std::pow(d, k);
  }
  return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
}

// 3-parameter fit over (a,b,c) with mu = max + e^a, sigma = e^b, k = e^c,
// which builds the support constraint into the parametrization
struct FitResult {
  double location = 0.0;
  bool ok = false;
};

FitResult fit_reverse_weibull(const std::vector<double>& xs) {
  const double xmax = *std::max_element(xs.begin(), xs.end());
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  double sd = std::sqrt(var / double(xs.size()));
  if (!(sd > 1e-12 * std::max(1.0, std::abs(xmax)))) return {xmax, false};

  auto eval = [&](const std::array<double, 3>& p) {
    return reverse_weibull_nll(xs, xmax + std::exp(p[0]), std::exp(p[1]), std::exp(p[2]));
  };

  // Nelder-Mead on the log parameters
  std::array<std::array<double, 3>, 4> simplex;
  simplex[0] = {std::log(0.1 * sd), std::log(sd), 0.0};
  for (int i = 1; i < 4; ++i) {
    simplex[i] = simplex[0];
    simplex[i][i - 1] += 0.5;
  }
  std::array<double, 4> f{};
  for (int i = 0; i < 4; ++i) f[i] = eval(simplex[i]);

  for (int iter = 0; iter < 500; ++iter) {
    std::array<int, 4> ord{0, 1, 2, 3};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
    int lo = ord[0], hi = ord[3], nh = ord[2];
    if (std::abs(f[hi] - f[lo]) <= 1e-8 * (1.0 + std::abs(f[lo]))) break;

    std::array<double, 3> cen{};
    for (int i = 0; i < 4; ++i)
      if (i != hi)
        for (int d = 0; d < 3; ++d) cen[d] += simplex[i][d] / 3.0;

    auto blend = [&](double w) {
      std::array<double, 3> p;
      for (int d = 0; d < 3; ++d) p[d] = cen[d] + w * (cen[d] - simplex[hi][d]);
      return p;
    };
    auto refl = blend(1.0);
    double fr = eval(refl);
    if (fr < f[lo]) {
      auto exp2 = blend(2.0);
      double fe = eval(exp2);
      if (fe < fr) {
        simplex[hi] = exp2;
        f[hi] = fe;
      } else {
        simplex[hi] = refl;
        f[hi] = fr;
      }
    } else if (fr < f[nh]) {
      simplex[hi] = refl;
      f[hi] = fr;
    } else {
      auto con = blend(fr < f[hi] ? 0.5 : -0.5);
      double fc = eval(con);
      if (fc < std::min(fr, f[hi])) {
        simplex[hi] = con;
        f[hi] = fc;
      } else {  // shrink toward the best vertex
        for (int i = 0; i < 4; ++i) {
          if (i == lo) continue;
          for (int d = 0; d < 3; ++d)
            simplex[i][d] = simplex[lo][d] + 0.5 * (simplex[i][d] - simplex[lo][d]);
          f[i] = eval(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (f[i] < f[best]) best = i;
  if (!std::isfinite(f[best])) return {xmax, false};
  return {xmax + std::exp(simplex[best][0]), true};
}

}  // namespace

LipschitzEstimate estimate_lipschitz_weibull(const Tube& tube, double alpha,
                                             std::size_t n_bar, std::size_t batches,
                                             std::uint64_t seed) {
  if (!(alpha > 0.0)) throw Error(Errc::Argument, "lipschitz: alpha must be positive");
  if (n_bar < 2) throw Error(Errc::Argument, "lipschitz: need at least 2 pairs per batch");
  if (batches < 10) throw Error(Errc::Argument, "lipschitz: need at least 10 batches");

  const double tc = tube.horizon;
  LipschitzEstimate est;
  est.method = LipschitzMethod::ReverseWeibull;
  est.params = {alpha, n_bar, batches};

  std::vector<double> psi(batches);
  std::size_t stream = 0;
  for (Side side : {Side::Lower, Side::Upper}) {
    double L = 0.0;
    for (std::size_t i = 0; i < tube.dim(); ++i) {
      for (std::size_t m = 0; m < batches; ++m) {
        std::mt19937_64 g(mix_seed(seed, stream++));
        double best = 0.0;
        for (std::size_t j = 0; j < n_bar; ++j) {
          double ta = uniform(g, 0.0, tc);
          double tb = uniform(g, std::max(0.0, ta - alpha), std::min(tc, ta + alpha));
          // redraw near-coincident pairs: cancellation in the difference
          // quotient amplifies evaluation round-off without bound
          if (std::abs(tb - ta) < 1e-9 * alpha) {
            --j;
            continue;
          }
          double slope =
              std::abs(tube.eval(i, side, ta) - tube.eval(i, side, tb)) / std::abs(ta - tb);
          best = std::max(best, slope);
        }
        psi[m] = best;
      }
      FitResult fit = fit_reverse_weibull(psi);
      if (!fit.ok) est.degenerate_fallback = true;
      L = std::max(L, fit.location);
    }
    (side == Side::Lower ? est.L_L : est.L_U) = L;
  }
  return est;
}

double combine_lipschitz(double L_L, double L_U) {
  if (L_L < 0.0 || L_U < 0.0)
    throw Error(Errc::Argument, "combine_lipschitz: constants must be nonnegative");
  return std::max({L_L, L_U, L_L + L_U, L_L + 1.0, L_U + 1.0});
}

Certificate check_certificate(double eta_star, double L, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::Argument, "certificate: epsilon must be positive");
  if (L < 0.0) throw Error(Errc::Argument, "certificate: L must be nonnegative");
  Certificate c;
  c.eta_star = eta_star;
  c.L = L;
  c.epsilon = epsilon;
  c.margin = eta_star + L * epsilon;
  c.pass = c.margin <= 0.0;
  return c;
}

CertifyReport certify_pipeline(const Tube& tube, double eta_star, const TRasTask& task,
                               double epsilon, const CertifyOptions& opts) {
  CertifyReport rep;
  rep.method = opts.method;
  if (opts.method == LipschitzMethod::Analytic) {
    rep.L_L = tube.analytic_lipschitz(Side::Lower);
    rep.L_U = tube.analytic_lipschitz(Side::Upper);
  } else {
    WeibullParams wp = opts.weibull;
    if (!(wp.alpha > 0.0)) wp.alpha = tube.horizon / 1000.0;
    LipschitzEstimate est =
        estimate_lipschitz_weibull(tube, wp.alpha, wp.n_bar, wp.batches, opts.seed);
    rep.L_L = est.L_L;
    rep.L_U = est.L_U;
    rep.degenerate_fallback = est.degenerate_fallback;
  }
  rep.certificate = check_certificate(eta_star, combine_lipschitz(rep.L_L, rep.L_U), epsilon);
  // the margin check never stands alone: the containment oracle always runs
  rep.oracle = check_stt(tube, task, opts.oracle_time_steps, opts.oracle_edge_steps);
  rep.pass = rep.certificate.pass && rep.oracle.pass();
  return rep;
}

}  // namespace stt
