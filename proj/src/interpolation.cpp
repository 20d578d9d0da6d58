#include "cgrem/interpolation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cgrem/audit.hpp"
#include "cgrem/error.hpp"
#include "cgrem/parallel.hpp"

namespace cgrem {

namespace {

void require_triple(const JointTriple& triple, const CoordinatePartition& p) {
  if (triple.whole.size() != p.size() || triple.first.size() != p.size() ||
      triple.second.size() != p.size()) {
    throw DimensionError("triple draws must be lifted to the partition size N");
  }
}

std::string experiment_label(const CovarianceModel& m, const CoordinatePartition& p) {
  return "interp/" + m.name() + "/" + std::to_string(p.size()) + "/" +
         std::to_string(p.mask());
}

void require_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be >= 0");
}

// Per-draw quantities for a fixed set of t values on common draws.
struct DrawEvaluator {
  const CovarianceModel& model;
  const CoordinatePartition& partition;
  double beta;
  TripleSampler sampler;
  Eigen::MatrixXd gaps;
  std::string label;

  DrawEvaluator(const CovarianceModel& m, const CoordinatePartition& p, double b,
                SamplingPath path)
      : model(m),
        partition(p),
        beta(b),
        sampler(m, p, path),
        gaps(gap_matrix(m, p)),
        label(experiment_label(m, p)) {}

  JointTriple draw(const SeedPolicy& seeds, std::size_t index) const {
    return sampler.draw(seeds, label, index);
  }

  double derivative(const JointTriple& triple, double t) const {
    if (beta == 0.0) return 0.0;
    const TwoReplicaGibbs gibbs(triple, partition, beta, InterpolationPoint(t));
    return -0.5 * beta * beta * gibbs.expectation(gaps);
  }

  double alpha_t(const JointTriple& triple, double t) const {
    return log_partition_t(triple, partition, beta, InterpolationPoint(t)) /
           partition.size();
  }
};

QuenchedEstimate to_estimate(const MeanAndError& me, std::size_t samples,
                             double beta, int n, std::string quantity) {
  return {me.mean, me.std_error, samples, beta, n, std::move(quantity)};
}

}  // namespace

InterpolationPoint::InterpolationPoint(double t) : t_(t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("interpolation time must lie in [0, 1]");
  }
}

double interp_hamiltonian(const JointTriple& triple, const CoordinatePartition& p,
                          const SpinConfig& sigma, InterpolationPoint t) {
  require_triple(triple, p);
  if (sigma.size() != p.size()) throw DimensionError("configuration size does not match partition");
  const std::size_t i = sigma.index();
  return -(std::sqrt(t.whole_weight() * p.size()) * triple.whole.energy(i) +
           std::sqrt(t.block_weight() * p.first_size()) * triple.first.energy(i) +
           std::sqrt(t.block_weight() * p.second_size()) * triple.second.energy(i));
}

std::vector<double> interp_energies(const JointTriple& triple,
                                    const CoordinatePartition& p,
                                    InterpolationPoint t) {
  require_triple(triple, p);
  const double c0 = std::sqrt(t.whole_weight() * p.size());
  const double c1 = std::sqrt(t.block_weight() * p.first_size());
  const double c2 = std::sqrt(t.block_weight() * p.second_size());
  const std::size_t count = triple.whole.energies().size();
  std::vector<double> h(count);
  for (std::size_t i = 0; i < count; ++i) {
    h[i] = -(c0 * triple.whole.energy(i) + c1 * triple.first.energy(i) +
             c2 * triple.second.energy(i));
  }
  return h;
}

double log_partition_t(const JointTriple& triple, const CoordinatePartition& p,
                       double beta, InterpolationPoint t) {
  require_beta(beta);
  if (beta == 0.0) {
    require_triple(triple, p);
    return p.size() * std::numbers::ln2;
  }
  std::vector<double> exponents = interp_energies(triple, p, t);
  for (double& x : exponents) x *= -beta;
  return log_sum_exp(exponents);
}

TwoReplicaGibbs::TwoReplicaGibbs(const JointTriple& triple,
                                 const CoordinatePartition& p, double beta,
                                 InterpolationPoint t) {
  require_beta(beta);
  const std::vector<double> h = interp_energies(triple, p, t);
  weights_.resize(static_cast<Eigen::Index>(h.size()));
  double top = -std::numeric_limits<double>::infinity();
  for (double x : h) top = std::max(top, -beta * x);
  for (std::size_t i = 0; i < h.size(); ++i) weights_(i) = std::exp(-beta * h[i] - top);
  weights_ /= weights_.sum();
}

double TwoReplicaGibbs::weight(const SpinConfig& sigma, const SpinConfig& tau) const {
  return weights_(sigma.index()) * weights_(tau.index());
}

double TwoReplicaGibbs::total_weight() const {
  const double s = weights_.sum();
  return s * s;
}

double TwoReplicaGibbs::expectation(const Eigen::MatrixXd& observable) const {
  if (observable.rows() != weights_.size() || observable.cols() != weights_.size()) {
    throw DimensionError("observable must be a 2^N x 2^N matrix");
  }
  return weights_.dot(observable * weights_);
}

QuenchedEstimate derivative_estimator(const CovarianceModel& m,
                                      const CoordinatePartition& p, double beta,
                                      double t, const SamplingOptions& options) {
  require_beta(beta);
  InterpolationPoint point(t);
  if (options.samples < 2) throw ValidationError("need at least two samples for an error bar");
  const DrawEvaluator eval(m, p, beta, options.path);
  std::vector<double> values(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    values[i] = eval.derivative(eval.draw(options.seeds, i), point.t());
  });
  return to_estimate(mean_and_error(values), options.samples, beta, p.size(),
                     "dalpha_dt");
}

FiniteDifferenceReport finite_difference_check(const CovarianceModel& m,
                                               const CoordinatePartition& p,
                                               double beta, double t, double h,
                                               const SamplingOptions& options) {
  require_beta(beta);
  if (!(h > 0.0) || !(t - h > 0.0) || !(t + h < 1.0)) {
    throw ValidationError("finite difference needs 0 < t-h and t+h < 1");
  }
  if (options.samples < 2) throw ValidationError("need at least two samples for an error bar");
  const DrawEvaluator eval(m, p, beta, options.path);
  std::vector<double> analytic(options.samples);
  std::vector<double> central(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    const JointTriple triple = eval.draw(options.seeds, i);
    analytic[i] = eval.derivative(triple, t);
    central[i] = beta == 0.0 ? 0.0
                             : (eval.alpha_t(triple, t + h) - eval.alpha_t(triple, t - h)) /
                                   (2.0 * h);
  });
  FiniteDifferenceReport r;
  r.h = h;
  r.step_warning = h > 0.1;
  r.derivative = to_estimate(mean_and_error(analytic), options.samples, beta,
                             p.size(), "dalpha_dt");
  r.finite_difference = to_estimate(mean_and_error(central), options.samples,
                                    beta, p.size(), "central_difference");
  r.difference = r.derivative.value - r.finite_difference.value;
  r.combined_error = combined_error(
      {{1.0, r.derivative.std_error}, {1.0, r.finite_difference.std_error}});
  r.agree = std::abs(r.difference) <= 3.0 * r.combined_error;
  return r;
}

MonotonicityScan monotonicity_scan(const CovarianceModel& m,
                                   const CoordinatePartition& p, double beta,
                                   const std::vector<double>& t_grid,
                                   const SamplingOptions& options) {
  for (double t : t_grid) InterpolationPoint{t};
  MonotonicityScan scan;
  for (double t : t_grid) {
    ScanPoint point;
    point.t = t;
    point.derivative = derivative_estimator(m, p, beta, t, options);
    point.nonnegative = point.derivative.value >= -3.0 * point.derivative.std_error;
    scan.all_nonnegative = scan.all_nonnegative && point.nonnegative;
    scan.points.push_back(point);
  }
  return scan;
}

PathIntegralReport path_integral_check(const CovarianceModel& m,
                                       const CoordinatePartition& p,
                                       double beta, std::size_t grid_points,
                                       const SamplingOptions& options,
                                       double quadrature_allowance) {
  require_beta(beta);
  if (grid_points < 2) throw ValidationError("trapezoid rule needs at least two points");
  if (options.samples < 2) throw ValidationError("need at least two samples for an error bar");
  const DrawEvaluator eval(m, p, beta, options.path);
  const double step = 1.0 / static_cast<double>(grid_points - 1);
  std::vector<double> integral(options.samples);
  std::vector<double> margin(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    const JointTriple triple = eval.draw(options.seeds, i);
    double sum = 0.0;
    for (std::size_t k = 0; k < grid_points; ++k) {
      const double t = k + 1 == grid_points ? 1.0 : k * step;
      const double w = (k == 0 || k + 1 == grid_points) ? 0.5 : 1.0;
      sum += w * eval.derivative(triple, t);
    }
    integral[i] = sum * step;
    margin[i] = beta == 0.0 ? 0.0 : eval.alpha_t(triple, 1.0) - eval.alpha_t(triple, 0.0);
  });
  PathIntegralReport r;
  r.grid_points = grid_points;
  r.integral = to_estimate(mean_and_error(integral), options.samples, beta,
                           p.size(), "integrated_derivative");
  r.margin = to_estimate(mean_and_error(margin), options.samples, beta,
                         p.size(), "superadditivity_margin");
  r.difference = r.integral.value - r.margin.value;
  r.combined_error =
      combined_error({{1.0, r.integral.std_error}, {1.0, r.margin.std_error}});
  r.quadrature_allowance = quadrature_allowance;
  r.consistent = std::abs(r.difference) <= 3.0 * r.combined_error + quadrature_allowance;
  return r;
}

}  // namespace cgrem
