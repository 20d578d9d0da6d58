#include "cgrem/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cgrem/error.hpp"
#include "cgrem/parallel.hpp"

namespace cgrem {

namespace {

void require_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("beta must be a finite number >= 0");
  }
}

void require_samples(std::size_t samples) {
  if (samples < 2) throw ValidationError("need at least two samples for an error bar");
}

QuenchedEstimate exact_infinite_temperature(int n, std::size_t samples,
                                            std::string quantity) {
  return {std::numbers::ln2, 0.0, samples, 0.0, n, std::move(quantity)};
}

// (1/N) ln Z for draws 0..samples-1 of `sampler`, reduced in index order.
template <typename Sampler>
MeanAndError average_alpha(const Sampler& sampler, int n, double beta,
                           const SamplingOptions& options,
                           const std::string& label) {
  std::vector<double> values(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    RngStream rng = options.seeds.stream(label, i);
    values[i] = log_partition(sampler(rng), beta) / n;
  });
  return mean_and_error(values);
}

}  // namespace

double log_sum_exp(std::span<const double> exponents) {
  if (exponents.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(exponents.begin(), exponents.end());
  if (std::isinf(top)) return top;
  double sum = 0.0;
  for (double x : exponents) sum += std::exp(x - top);
  return top + std::log(sum);
}

double log_partition(const DisorderDraw& draw, double beta) {
  require_beta(beta);
  const auto& e = draw.energies();
  for (double x : e) {
    if (!std::isfinite(x)) throw ValidationError("energy is NaN or infinite");
  }
  if (beta == 0.0) return draw.size() * std::numbers::ln2;
  const double scale = beta * std::sqrt(static_cast<double>(draw.size()));
  std::vector<double> exponents(e.size());
  std::transform(e.begin(), e.end(), exponents.begin(),
                 [scale](double x) { return scale * x; });
  return log_sum_exp(exponents);
}

double jensen_bound(double beta) {
  require_beta(beta);
  return std::numbers::ln2 + 0.5 * beta * beta;
}

QuenchedEstimate quenched_alpha(const CovarianceModel& m, int n, double beta,
                                const SamplingOptions& options,
                                std::string_view experiment) {
  require_beta(beta);
  require_samples(options.samples);
  const std::string quantity = "alpha";
  const DisorderSampler sampler(m, n, options.path);
  if (beta == 0.0) return exact_infinite_temperature(n, options.samples, quantity);
  const std::string label =
      std::string(experiment) + "/" + m.name() + "/" + std::to_string(n);
  const auto [mean, error] = average_alpha(
      [&](RngStream& rng) { return sampler.draw(rng); }, n, beta, options, label);
  return {mean, error, options.samples, beta, n, quantity};
}

SuperadditivityReport superadditivity_report(const CovarianceModel& m,
                                             const CoordinatePartition& p,
                                             double beta,
                                             const SamplingOptions& options) {
  SuperadditivityReport r;
  r.partition = p;
  r.whole = quenched_alpha(m, p.size(), beta, options, "superadd/whole");
  r.first = quenched_alpha(submodel(m, p, Block::kFirst), p.first_size(), beta,
                           options, "superadd/first");
  r.second = quenched_alpha(submodel(m, p, Block::kSecond), p.second_size(),
                            beta, options, "superadd/second");
  const double w1 = static_cast<double>(p.first_size()) / p.size();
  const double w2 = static_cast<double>(p.second_size()) / p.size();
  if (beta == 0.0) {
    r.margin = 0.0;
    r.margin_error = 0.0;
  } else {
    r.margin = r.whole.value - w1 * r.first.value - w2 * r.second.value;
    r.margin_error = combined_error({{1.0, r.whole.std_error},
                                     {w1, r.first.std_error},
                                     {w2, r.second.std_error}});
  }
  r.satisfied = r.margin >= -3.0 * r.margin_error;
  return r;
}

RescalingReport sk_rescaling_check(int n, double beta,
                                   const SamplingOptions& options) {
  require_beta(beta);
  require_samples(options.samples);
  if (n < 2) throw ValidationError("the rescaling check needs N >= 2");
  RescalingReport r;
  const double scaled = std::sqrt(2.0) * beta;
  r.full = quenched_alpha(CovarianceModel::sk(), n, beta, options, "rescaling/full");
  if (beta == 0.0) {
    r.standard = exact_infinite_temperature(n, options.samples, "alpha_sk_standard");
  } else {
    const CouplingStructure structure = sk_standard_structure(n);
    const auto [mean, error] = average_alpha(
        [&](RngStream& rng) { return sample_structural(structure, rng); }, n,
        scaled, options, "rescaling/standard/" + std::to_string(n));
    r.standard = {mean, error, options.samples, scaled, n, "alpha_sk_standard"};
  }
  r.difference = r.standard.value - r.full.value;
  r.combined_error = combined_error({{1.0, r.standard.std_error}, {1.0, r.full.std_error}});
  r.consistent = std::abs(r.difference) <= 3.0 * r.combined_error;
  return r;
}

}  // namespace cgrem
