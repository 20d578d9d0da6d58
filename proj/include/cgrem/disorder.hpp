#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>

#include "cgrem/draw.hpp"
#include "cgrem/models.hpp"
#include "cgrem/rng.hpp"
#include "cgrem/spin_space.hpp"

namespace cgrem {

inline constexpr double kCholeskyTruncation = 1e-10;

// Immutable factor L (2^N x rank) with L L^T = C; zero-pivot directions
// are dropped, so degenerate covariances are accepted.
class CholeskyFactor {
 public:
  // Throws ValidationError when C is asymmetric or indefinite beyond
  // 1e-8 * max diagonal.
  explicit CholeskyFactor(const Eigen::MatrixXd& c);

  int size() const { return n_; }
  int rank() const { return static_cast<int>(factor_.cols()); }
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  int n_;
  Eigen::MatrixXd factor_;
};

DisorderDraw sample_cholesky(const CholeskyFactor& factor, RngStream& rng);
DisorderDraw sample_cholesky(const Eigen::MatrixXd& c, RngStream& rng);

DisorderDraw sample_structural(const CovarianceModel& m, int n, RngStream& rng);
DisorderDraw sample_structural(const CouplingStructure& s, RngStream& rng);

enum class SamplingPath { kAuto, kStructural, kCholesky };

// Reusable sampler for one model at one size. kAuto picks structural
// sampling when the model has a coupling structure and falls back to
// Cholesky otherwise. Safe to share across threads.
class DisorderSampler {
 public:
  DisorderSampler(const CovarianceModel& m, int n,
                  SamplingPath path = SamplingPath::kAuto);

  int size() const { return n_; }
  SamplingPath path() const { return path_; }
  const std::string& model_name() const { return name_; }

  DisorderDraw draw(RngStream& rng) const;

 private:
  std::string name_;
  int n_;
  SamplingPath path_;
  std::shared_ptr<const CouplingStructure> structure_;
  std::shared_ptr<const CholeskyFactor> factor_;
};

// E^(k)_sigma = E_{pi_k(sigma)}.
DisorderDraw lift(const DisorderDraw& draw, const CoordinatePartition& p,
                  Block block);

// Three mutually independent families over Sigma_N: the size-N system and
// the lifts of independent size-N1 and size-N2 systems.
struct JointTriple {
  DisorderDraw whole;
  DisorderDraw first;
  DisorderDraw second;
};

class TripleSampler {
 public:
  TripleSampler(const CovarianceModel& m, const CoordinatePartition& p,
                SamplingPath path = SamplingPath::kAuto);

  const CoordinatePartition& partition() const { return partition_; }

  // Consumes whole, first, second from one stream, in that order.
  JointTriple draw(RngStream& rng) const;
  // Each family gets its own derived stream of (experiment, index).
  JointTriple draw(const SeedPolicy& seeds, std::string_view experiment,
                   std::uint64_t index) const;

 private:
  CoordinatePartition partition_;
  DisorderSampler whole_;
  DisorderSampler first_;
  DisorderSampler second_;
};

JointTriple joint_triple(const CovarianceModel& m, const CoordinatePartition& p,
                         RngStream& rng);

// One line per draw, 2^N whitespace-separated energies, round-trip precision.
void write_draw(std::ostream& out, const DisorderDraw& draw);

}  // namespace cgrem
