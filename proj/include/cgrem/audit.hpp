#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgrem/models.hpp"
#include "cgrem/spin_space.hpp"

namespace cgrem {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kAuditCap = 10;
inline constexpr double kExactGapTolerance = 1e-12;
inline constexpr double kCustomGapTolerance = 1e-9;
inline constexpr double kPsdTolerance = 1e-8;

enum class Verdict { kHolds, kViolated, kHoldsWithEquality };

std::string to_string(Verdict v);

// Exact covariance for the models whose values are rational functions of
// the overlap (SK, p-spin, REM); nullopt otherwise.
std::optional<Rational> exact_covariance(const CovarianceModel& m,
                                         const SpinConfig& sigma,
                                         const SpinConfig& tau);

// c_N(s,t) - (N1/N) c_N1(pi1 s, pi1 t) - (N2/N) c_N2(pi2 s, pi2 t), with the
// block models taken from submodel().
double condition_gap(const CovarianceModel& m, const CoordinatePartition& p,
                     const SpinConfig& sigma, const SpinConfig& tau);
std::optional<Rational> exact_condition_gap(const CovarianceModel& m,
                                            const CoordinatePartition& p,
                                            const SpinConfig& sigma,
                                            const SpinConfig& tau);

// Gap for every ordered pair, indexed like enumerate_configs.
Eigen::MatrixXd gap_matrix(const CovarianceModel& m,
                           const CoordinatePartition& p);

struct ConditionReport {
  int n = 0;
  CoordinatePartition partition{2, 1};
  double max_gap = 0.0;
  double min_gap = 0.0;
  SpinConfig witness_sigma{1, 0};
  SpinConfig witness_tau{1, 0};
  std::uint64_t pairs_checked = 0;
  double tolerance = kExactGapTolerance;
  // Set when every gap was evaluated in exact rational arithmetic.
  std::optional<Rational> exact_max_gap;
  Verdict verdict = Verdict::kHolds;
};

struct AuditResult {
  std::vector<ConditionReport> reports;
  Verdict verdict = Verdict::kHoldsWithEquality;
  std::size_t worst = 0;  // report with the largest max_gap
};

double default_gap_tolerance(const CovarianceModel& m);

// Default partitions: canonical prefixes, or for GREM models the
// layer-respecting splits of the tree.
std::vector<CoordinatePartition> audit_partitions(const CovarianceModel& m,
                                                  int n, PartitionMode mode);

ConditionReport check_partition(const CovarianceModel& m,
                                const CoordinatePartition& p,
                                std::optional<double> tolerance = std::nullopt);

AuditResult check_condition(const CovarianceModel& m, int n,
                            PartitionMode mode,
                            std::optional<double> tolerance = std::nullopt,
                            unsigned threads = 1);
AuditResult check_condition(const CovarianceModel& m, int n,
                            const std::vector<CoordinatePartition>& partitions,
                            std::optional<double> tolerance = std::nullopt,
                            unsigned threads = 1);

struct PsdReport {
  // Smallest pivot of the factorization (an upper bound on the smallest
  // eigenvalue); the residual diagonal when the matrix is rank deficient.
  double min_eigenvalue_estimate = 0.0;
  bool psd = false;
  int rank = 0;
};

PsdReport validate_psd(const Eigen::MatrixXd& matrix,
                       double tolerance = kPsdTolerance);

}  // namespace cgrem
