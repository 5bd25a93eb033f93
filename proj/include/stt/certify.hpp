#pragma once

#include <cstdint>

#include "stt/task.hpp"
#include "stt/tube.hpp"

namespace stt {

enum class LipschitzMethod { Analytic, ReverseWeibull };

struct WeibullParams {
  double alpha = 0.0;  // pair-distance cap; 0 picks horizon/1000
  std::size_t n_bar = 500;
  std::size_t batches = 100;
};

struct LipschitzEstimate {
  double L_L = 0.0;
  double L_U = 0.0;
  LipschitzMethod method = LipschitzMethod::Analytic;
  // set when a location fit degenerated (constant slopes / failed optimizer)
  // and the batch-maximum fallback was used instead
  bool degenerate_fallback = false;
  WeibullParams params;
};

struct Certificate {
  double eta_star = 0.0;
  double L = 0.0;
  double epsilon = 0.0;
  double margin = 0.0;  // eta_star + L * epsilon
  bool pass = false;
};

struct CertifyOptions {
  LipschitzMethod method = LipschitzMethod::Analytic;
  WeibullParams weibull;
  std::uint64_t seed = 1;
  std::size_t oracle_time_steps = 5000;
  std::size_t oracle_edge_steps = 50;
};

struct CertifyReport {
  Certificate certificate;
  double L_L = 0.0;
  double L_U = 0.0;
  LipschitzMethod method = LipschitzMethod::Analytic;
  bool degenerate_fallback = false;
  SttCheckReport oracle;
  bool pass = false;  // certificate AND oracle
};

// slope extremes of one curve family sampled by random close pairs, batch
// maxima fitted to a reverse Weibull; the location parameter estimates the
// Lipschitz constant
LipschitzEstimate estimate_lipschitz_weibull(const Tube& tube, double alpha,
                                             std::size_t n_bar, std::size_t batches,
                                             std::uint64_t seed);

// max{L_L, L_U, L_L + L_U, L_L + 1, L_U + 1}
double combine_lipschitz(double L_L, double L_U);

Certificate check_certificate(double eta_star, double L, double epsilon);

// margin check plus the independent containment oracle; overall pass needs both
CertifyReport certify_pipeline(const Tube& tube, double eta_star, const TRasTask& task,
                               double epsilon, const CertifyOptions& opts = {});

}  // namespace stt
