#include "cgrem/stats.hpp"

#include <cmath>
#include <utility>

#include "cgrem/error.hpp"

namespace cgrem {

MeanAndError mean_and_error(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("need at least two samples for an error bar");
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : values) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  const double variance = m2 / static_cast<double>(k - 1);
  return {mean, std::sqrt(variance / static_cast<double>(k))};
}

double combined_error(std::initializer_list<std::pair<double, double>> weight_and_error) {
  double sum = 0.0;
  for (const auto& [w, e] : weight_and_error) sum += w * w * e * e;
  return std::sqrt(sum);
}

}  // namespace cgrem
