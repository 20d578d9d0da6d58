#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgrem/models.hpp"

namespace cgrem {

inline constexpr const char* kToolName = "cgrem";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSeedEnvironmentVariable = "CGREM_SEED";

enum ExitStatus : int { kExitPass = 0, kExitViolation = 1, kExitError = 2 };

// Grammar: sk | sk-standard | rem | pspin:<p> | mixed:<p>=<w>[,<p>=<w>...]
//          | grem:<treefile> | custom:<matrixfile>[,<matrixfile>...]
// Throws ValidationError naming the offending character position.
CovarianceModel parse_model(std::string_view spec);

// "a:b:count" (inclusive, equispaced) or a comma-separated list.
std::vector<double> parse_grid(std::string_view spec);

struct ExperimentConfig {
  std::string command;
  std::string model = "sk";
  std::optional<int> n;
  std::optional<int> n1;
  std::optional<std::uint32_t> mask;
  std::string partition_mode = "canonical";
  std::vector<double> betas{1.0};
  std::string t_grid = "0.1:0.9:9";
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::string sampling_path = "auto";
  std::string tree;
  std::vector<int> lift;
  std::string format = "csv";
  std::string output;
  unsigned threads = 1;
  bool timing = false;
};

// Executes one experiment and writes the artifact to `out`. Returns an
// ExitStatus; library errors are reported on `err` with status 2.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Full command line front end (argument parsing, output file handling).
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace cgrem
