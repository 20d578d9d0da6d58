#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgrem/draw.hpp"
#include "cgrem/rng.hpp"
#include "cgrem/spin_space.hpp"

namespace cgrem {

// Layered rooted tree of the generalized REM. Layer i furcates into
// 2^k_i branches and owns coordinates [offset_i, offset_i + k_i); each
// branch starting on layer i carries an independent N(0, a_i) term.
class GremTree {
 public:
  // Throws ValidationError listing every violated constraint.
  GremTree(std::vector<int> exponents, std::vector<double> variances,
           int n);

  int layers() const { return static_cast<int>(k_.size()); }
  int size() const { return n_; }
  const std::vector<int>& exponents() const { return k_; }
  const std::vector<double>& variances() const { return a_; }
  // v[l] = a_1 + ... + a_l, with v[0] = 0 and v[layers] = 1.
  const std::vector<double>& cumulative() const { return v_; }

  int layer_offset(int layer) const;
  Word layer_mask(int layer) const;

  // Tree on the coordinates selected by `mask`: layer i keeps the
  // popcount(mask & layer_mask(i)) selected coordinates, same variances.
  GremTree induced(Word mask) const;

  std::string to_string() const;

  friend bool operator==(const GremTree&, const GremTree&) = default;

 private:
  int n_;
  std::vector<int> k_;
  std::vector<double> a_;
  std::vector<double> v_;
};

// Every violated tree constraint, empty when (k, a, n) is valid.
std::vector<std::string> tree_violations(const std::vector<int>& k,
                                         const std::vector<double>& a, int n);
GremTree validate_tree(const std::vector<int>& k, const std::vector<double>& a,
                       int n);

// Tree file: line 1 "layers N", line 2 exponents, line 3 variances.
GremTree read_tree(std::istream& in);
GremTree read_tree_file(const std::string& path);
void write_tree(std::ostream& out, const GremTree& tree);

// Number of leading layers on which the layer blocks of sigma and tau agree.
int merge_level(const GremTree& tree, const SpinConfig& sigma,
                const SpinConfig& tau);
double grem_covariance(const GremTree& tree, const SpinConfig& sigma,
                       const SpinConfig& tau);

// Total branch count, sum over layers of 2^(k_1 + ... + k_i).
std::size_t grem_branch_count(const GremTree& tree);
DisorderDraw sample_grem(const GremTree& tree, RngStream& rng);

// Splits with the first block taking the leading k1_i coordinates of each
// layer, for every 0 <= k1_i <= k_i with both blocks nonempty.
std::vector<CoordinatePartition> layer_respecting_partitions(
    const GremTree& tree);

enum class LiftPlacement { kLeading, kTrailing };

// Raises each layer's furcation of `source` from 2^k_i(source) to
// 2^k_i(target); new branches reuse the parent's value. The projection
// keeps the leading (or trailing) k_i(source) coordinates of every target
// layer block.
class TreeLift {
 public:
  TreeLift(GremTree source, std::vector<int> target_exponents,
           LiftPlacement placement = LiftPlacement::kLeading);

  const GremTree& source() const { return source_; }
  const GremTree& target() const { return target_; }
  LiftPlacement placement() const { return placement_; }
  // Target coordinates that survive the projection.
  Word projection_mask() const { return mask_; }

  SpinConfig project(const SpinConfig& sigma) const;
  // The corresponding split of the target coordinates; empty for the
  // identity lift.
  std::optional<CoordinatePartition> partition() const;

 private:
  GremTree source_;
  GremTree target_;
  LiftPlacement placement_;
  Word mask_;
};

DisorderDraw lift_tree(const TreeLift& lift, const DisorderDraw& source_draw);
double lifted_covariance(const TreeLift& lift, const SpinConfig& sigma,
                         const SpinConfig& tau);

struct LiftInequalityReport {
  // min over target pairs of lifted covariance - v[merge level].
  double min_margin = 0.0;
  SpinConfig witness_sigma{1, 0};
  SpinConfig witness_tau{1, 0};
  std::uint64_t pairs_checked = 0;

  bool holds(double tolerance = 1e-12) const {
    return min_margin >= -tolerance;
  }
};

// Exhaustive check of lifted covariance >= v[l] over all target pairs.
LiftInequalityReport check_lift_inequality(const TreeLift& lift);

}  // namespace cgrem
