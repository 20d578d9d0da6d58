#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "cgrem/disorder.hpp"
#include "cgrem/models.hpp"
#include "cgrem/rng.hpp"
#include "cgrem/stats.hpp"

namespace cgrem {

struct SamplingOptions {
  std::size_t samples = 1000;
  SeedPolicy seeds{};
  unsigned threads = 1;
  SamplingPath path = SamplingPath::kAuto;
};

// Max-shifted log(sum exp(x)).
double log_sum_exp(std::span<const double> exponents);

// ln sum_sigma exp(beta sqrt(N) E_sigma).
double log_partition(const DisorderDraw& draw, double beta);

// ln 2 + beta^2 / 2, the annealed bound on alpha_N.
double jensen_bound(double beta);

// (1/N) Av ln Z_N. Draw i uses stream (experiment/model/N, i). beta = 0 is
// answered exactly (ln 2, zero error) without sampling.
QuenchedEstimate quenched_alpha(const CovarianceModel& m, int n, double beta,
                                const SamplingOptions& options,
                                std::string_view experiment = "alpha");

struct SuperadditivityReport {
  CoordinatePartition partition{2, 1};
  QuenchedEstimate whole;
  QuenchedEstimate first;
  QuenchedEstimate second;
  // alpha_N - (N1/N) alpha_N1 - (N2/N) alpha_N2
  double margin = 0.0;
  double margin_error = 0.0;
  bool satisfied = true;  // margin >= -3 * margin_error
};

SuperadditivityReport superadditivity_report(const CovarianceModel& m,
                                             const CoordinatePartition& p,
                                             double beta,
                                             const SamplingOptions& options);

struct RescalingReport {
  QuenchedEstimate standard;  // alpha^SK_N(sqrt(2) beta), i<j couplings
  QuenchedEstimate full;      // alpha_N(beta), full N^2 couplings
  double difference = 0.0;
  double combined_error = 0.0;
  bool consistent = true;  // |difference| <= 3 * combined_error
};

RescalingReport sk_rescaling_check(int n, double beta,
                                   const SamplingOptions& options);

}  // namespace cgrem
