#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cgrem/disorder.hpp"
#include "cgrem/models.hpp"
#include "cgrem/stats.hpp"
#include "cgrem/thermo.hpp"

namespace cgrem {

// Interpolation time t; the size-N system enters with weight t, each
// lifted block system with weight 1 - t.
class InterpolationPoint {
 public:
  explicit InterpolationPoint(double t);

  double t() const { return t_; }
  double whole_weight() const { return t_; }
  double block_weight() const { return 1.0 - t_; }

 private:
  double t_;
};

// H(sigma, t) = -[sqrt(tN) E_sigma + sqrt((1-t)N1) E1_sigma + sqrt((1-t)N2) E2_sigma]
// where E1, E2 are the lifted families of the triple.
double interp_hamiltonian(const JointTriple& triple, const CoordinatePartition& p,
                          const SpinConfig& sigma, InterpolationPoint t);
std::vector<double> interp_energies(const JointTriple& triple,
                                    const CoordinatePartition& p,
                                    InterpolationPoint t);

// ln sum_sigma exp(-beta H(sigma, t)).
double log_partition_t(const JointTriple& triple, const CoordinatePartition& p,
                       double beta, InterpolationPoint t);

// Product Gibbs measure over replica pairs (sigma, tau) for one realization.
class TwoReplicaGibbs {
 public:
  TwoReplicaGibbs(const JointTriple& triple, const CoordinatePartition& p,
                  double beta, InterpolationPoint t);

  // Single-replica Gibbs weights; the pair weight is marginal[s] * marginal[t].
  const Eigen::VectorXd& marginal() const { return weights_; }
  double weight(const SpinConfig& sigma, const SpinConfig& tau) const;
  double total_weight() const;
  // sum_{sigma,tau} w_sigma w_tau O(sigma, tau), exact double enumeration.
  double expectation(const Eigen::MatrixXd& observable) const;

 private:
  Eigen::VectorXd weights_;
};

// (1/N) d/dt Av ln Z_N(t) = -(beta^2 / 2) < gap(sigma, tau) >_t, with the
// replica average computed exactly per draw and Av by Monte Carlo. Draw i
// is shared across t (common random numbers).
QuenchedEstimate derivative_estimator(const CovarianceModel& m,
                                      const CoordinatePartition& p, double beta,
                                      double t, const SamplingOptions& options);

struct FiniteDifferenceReport {
  QuenchedEstimate derivative;
  // [alpha(t+h) - alpha(t-h)] / 2h on common draws; O(h^2) bias.
  QuenchedEstimate finite_difference;
  double h = 0.0;
  double difference = 0.0;
  double combined_error = 0.0;
  bool agree = true;         // |difference| <= 3 * combined_error
  bool step_warning = false;  // h > 0.1
};

FiniteDifferenceReport finite_difference_check(const CovarianceModel& m,
                                               const CoordinatePartition& p,
                                               double beta, double t, double h,
                                               const SamplingOptions& options);

struct ScanPoint {
  double t = 0.0;
  QuenchedEstimate derivative;
  bool nonnegative = true;  // value >= -3 * std_error
};

struct MonotonicityScan {
  std::vector<ScanPoint> points;
  bool all_nonnegative = true;
};

MonotonicityScan monotonicity_scan(const CovarianceModel& m,
                                   const CoordinatePartition& p, double beta,
                                   const std::vector<double>& t_grid,
                                   const SamplingOptions& options);

// Trapezoid integral of the derivative over an equispaced grid on [0, 1]
// against the boundary difference (1/N)[ln Z(1) - ln Z(0)], which averages
// to alpha_N - (N1/N) alpha_N1 - (N2/N) alpha_N2.
struct PathIntegralReport {
  std::size_t grid_points = 0;
  QuenchedEstimate integral;
  QuenchedEstimate margin;
  double difference = 0.0;
  double combined_error = 0.0;
  double quadrature_allowance = 0.0;
  bool consistent = true;
};

PathIntegralReport path_integral_check(const CovarianceModel& m,
                                       const CoordinatePartition& p,
                                       double beta, std::size_t grid_points,
                                       const SamplingOptions& options,
                                       double quadrature_allowance = 1e-2);

}  // namespace cgrem
