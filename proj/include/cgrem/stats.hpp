#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace cgrem {

// Monte Carlo estimate of a disorder-averaged quantity.
struct QuenchedEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(samples)
  std::size_t samples = 0;
  double beta = 0.0;
  int n = 0;
  std::string quantity;
};

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Welford accumulation in index order; a constant sequence gives exactly
// that constant with zero error. Requires at least two values.
MeanAndError mean_and_error(std::span<const double> values);

// Error of a weighted sum of independent estimates.
double combined_error(std::initializer_list<std::pair<double, double>> weight_and_error);

}  // namespace cgrem
