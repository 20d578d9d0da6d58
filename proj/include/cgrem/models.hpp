#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cgrem/grem.hpp"
#include "cgrem/spin_space.hpp"

namespace cgrem {

inline constexpr int kMatrixCap = 12;

enum class ModelKind { kSkFull, kSkStandard, kPSpin, kMixed, kRem, kGrem, kCustom };

// Variances w_p of the order-p coupling blocks; psi(q) = sum_p w_p q^p.
class MixedCoefficients {
 public:
  // Requires p >= 1, w_p >= 0 and sum w_p = 1 within 1e-12.
  explicit MixedCoefficients(std::map<int, double> weights);

  const std::map<int, double>& weights() const { return w_; }
  double psi(double q) const;

  friend bool operator==(const MixedCoefficients&,
                         const MixedCoefficients&) = default;

 private:
  std::map<int, double> w_;
};

// User-supplied covariance matrices, at most one per system size.
class CustomCovariance {
 public:
  CustomCovariance() = default;

  // Validates symmetry (1e-12), unit diagonal (1e-12) and a 2^n dimension.
  void add(Eigen::MatrixXd matrix);
  // nullptr when no matrix of size 2^n was supplied.
  const Eigen::MatrixXd* at(int n) const;
  std::vector<int> sizes() const;

 private:
  std::map<int, std::shared_ptr<const Eigen::MatrixXd>> by_size_;
};

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::string& path);

// A covariance rule c_N(sigma, tau). SK, p-spin, mixed and REM rules are
// defined at every N; a GREM model is tied to its tree's N; a custom model
// answers at the sizes it holds matrices for.
class CovarianceModel {
 public:
  static CovarianceModel sk();
  // Covariance queries answer with the full-model value; the standard
  // model only enters through the temperature rescaling check.
  static CovarianceModel sk_standard();
  static CovarianceModel pspin(int p);
  static CovarianceModel mixed(MixedCoefficients w);
  static CovarianceModel rem();
  static CovarianceModel grem(GremTree tree);
  static CovarianceModel custom(CustomCovariance matrices);

  ModelKind kind() const { return kind_; }
  // Round-trips through parse_model for the built-in kinds.
  std::string name() const;

  int order() const;  // p-spin order; 2 for SK
  const MixedCoefficients& mixed_weights() const;
  const GremTree& tree() const;
  const CustomCovariance& custom_matrices() const;

  // Covariance depends on (sigma, tau) only through their overlap.
  bool overlap_symmetric() const;
  bool supports_size(int n) const;

 private:
  CovarianceModel(ModelKind kind, std::string name);

  ModelKind kind_;
  std::string name_;
  int order_ = 0;
  std::variant<std::monostate, MixedCoefficients, GremTree, CustomCovariance>
      data_;
};

double covariance(const CovarianceModel& m, const SpinConfig& sigma,
                  const SpinConfig& tau);

// The model governing one block of a split. Size-parametric and custom
// models return themselves; a GREM model returns the tree induced on the
// block's coordinates.
CovarianceModel submodel(const CovarianceModel& m,
                         const CoordinatePartition& p, Block block);

Eigen::MatrixXd build_covariance_matrix(const CovarianceModel& m, int n,
                                        int cap = kMatrixCap);

// Independent unit Gaussian couplings J_c and the linear map to energies,
// E_sigma = sum_c coefficient_c(sigma) J_c. Two shapes exist: Walsh terms
// (coefficient = scale * prod_{i in mask} sigma_i) for polynomial models,
// and tree terms (one coupling per branch, shared by all leaves below it)
// for REM and GREM.
class CouplingStructure {
 public:
  struct WalshTerm {
    Word mask;
    double scale;
  };
  struct TreeLayer {
    int depth;  // cumulative exponent; the layer has 2^depth branches
    double scale;
  };
  struct BlockInfo {
    std::string label;
    std::size_t count;
    double scale;
  };

  static CouplingStructure walsh(int n, std::vector<WalshTerm> terms,
                                 std::vector<BlockInfo> blocks);
  static CouplingStructure tree(int n, std::vector<TreeLayer> layers);

  int size() const { return n_; }
  std::size_t coupling_count() const { return count_; }
  const std::vector<BlockInfo>& blocks() const { return blocks_; }

  // Coefficient row of sigma, length coupling_count().
  std::vector<double> coefficients(const SpinConfig& sigma) const;
  // Energies of all 2^n configurations for one coupling vector.
  std::vector<double> energies(std::span<const double> couplings) const;

 private:
  CouplingStructure() = default;

  int n_ = 0;
  std::size_t count_ = 0;
  std::vector<WalshTerm> walsh_;
  std::vector<TreeLayer> tree_;
  std::vector<BlockInfo> blocks_;
};

inline constexpr std::size_t kCouplingCap = std::size_t{1} << 24;

// SK_FULL, PSPIN, MIXED, REM, GREM. Others throw UnsupportedError.
CouplingStructure coupling_structure(const CovarianceModel& m, int n);

// E^SK_sigma = (1/N) sum_{i<j} J_ij sigma_i sigma_j. Not a unit-variance
// family, so it is not a CovarianceModel.
CouplingStructure sk_standard_structure(int n);

// In-place Walsh-Hadamard transform, out[x] = sum_m in[m] (-1)^popcount(m&x).
void walsh_hadamard(std::span<double> values);

}  // namespace cgrem
