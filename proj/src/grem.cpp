#include "cgrem/grem.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cgrem/error.hpp"

namespace cgrem {

namespace {

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

std::vector<std::string> tree_violations(const std::vector<int>& k,
                                         const std::vector<double>& a, int n) {
  std::vector<std::string> errors;
  if (k.empty()) errors.emplace_back("tree needs at least one layer");
  if (k.size() != a.size()) {
    errors.push_back("got " + std::to_string(k.size()) + " exponents but " +
                     std::to_string(a.size()) + " variances");
  }
  if (n < 1 || n > kMaxSpins) {
    errors.push_back("system size " + std::to_string(n) + " out of range");
  }
  long sum_k = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 0) {
      errors.push_back("exponent k_" + std::to_string(i + 1) +
                       " is negative");
    }
    sum_k += k[i];
  }
  if (sum_k != n) {
    errors.push_back("exponents sum to " + std::to_string(sum_k) +
                     ", expected N=" + std::to_string(n));
  }
  double sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !std::isfinite(a[i])) {
      errors.push_back("variance a_" + std::to_string(i + 1) +
                       " is not a finite nonnegative number");
    }
    sum_a += a[i];
  }
  if (!(std::abs(sum_a - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "variances sum to " << sum_a << ", expected 1";
    errors.push_back(msg.str());
  }
  return errors;
}

GremTree validate_tree(const std::vector<int>& k, const std::vector<double>& a,
                       int n) {
  return GremTree(k, a, n);
}

GremTree::GremTree(std::vector<int> exponents, std::vector<double> variances,
                   int n)
    : n_(n), k_(std::move(exponents)), a_(std::move(variances)) {
  const auto errors = tree_violations(k_, a_, n_);
  if (!errors.empty()) throw ValidationError("invalid GREM tree: " + join_lines(errors));
  v_.assign(k_.size() + 1, 0.0);
  for (std::size_t i = 0; i < a_.size(); ++i) v_[i + 1] = v_[i] + a_[i];
  v_.back() = 1.0;
}

int GremTree::layer_offset(int layer) const {
  return std::accumulate(k_.begin(), k_.begin() + layer, 0);
}

Word GremTree::layer_mask(int layer) const {
  const int offset = layer_offset(layer);
  return low_mask(k_[layer]) << offset;
}

GremTree GremTree::induced(Word mask) const {
  std::vector<int> k(k_.size());
  for (int i = 0; i < layers(); ++i) k[i] = std::popcount(mask & layer_mask(i));
  return GremTree(std::move(k), a_, std::popcount(mask & low_mask(n_)));
}

std::string GremTree::to_string() const {
  std::ostringstream out;
  out << "grem(k=";
  for (std::size_t i = 0; i < k_.size(); ++i) out << (i ? "," : "") << k_[i];
  out << ";a=";
  for (std::size_t i = 0; i < a_.size(); ++i) out << (i ? "," : "") << a_[i];
  out << ")";
  return out.str();
}

GremTree read_tree(std::istream& in) {
  int layers = 0;
  int n = 0;
  if (!(in >> layers >> n) || layers < 1) {
    throw ValidationError("tree file: first line must be 'layers N'");
  }
  std::vector<int> k(layers);
  for (auto& x : k) {
    if (!(in >> x)) throw ValidationError("tree file: expected " + std::to_string(layers) + " exponents");
  }
  std::vector<double> a(layers);
  for (auto& x : a) {
    if (!(in >> x)) throw ValidationError("tree file: expected " + std::to_string(layers) + " variances");
  }
  return GremTree(std::move(k), std::move(a), n);
}

GremTree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tree file '" + path + "'");
  return read_tree(in);
}

void write_tree(std::ostream& out, const GremTree& tree) {
  out << tree.layers() << ' ' << tree.size() << '\n';
  for (int i = 0; i < tree.layers(); ++i) out << (i ? " " : "") << tree.exponents()[i];
  out << '\n';
  auto prec = out.precision(17);
  for (int i = 0; i < tree.layers(); ++i) out << (i ? " " : "") << tree.variances()[i];
  out.precision(prec);
  out << '\n';
}

int merge_level(const GremTree& tree, const SpinConfig& sigma,
                const SpinConfig& tau) {
  if (sigma.size() != tree.size() || tau.size() != tree.size()) {
    throw DimensionError("configuration size does not match GREM tree size " +
                         std::to_string(tree.size()));
  }
  const Word diff = sigma.bits() ^ tau.bits();
  for (int i = 0; i < tree.layers(); ++i) {
    if ((diff & tree.layer_mask(i)) != 0) return i;
  }
  return tree.layers();
}

double grem_covariance(const GremTree& tree, const SpinConfig& sigma,
                       const SpinConfig& tau) {
  return tree.cumulative()[merge_level(tree, sigma, tau)];
}

std::size_t grem_branch_count(const GremTree& tree) {
  std::size_t total = 0;
  int depth = 0;
  for (int k : tree.exponents()) {
    depth += k;
    total += std::size_t{1} << depth;
  }
  return total;
}

DisorderDraw sample_grem(const GremTree& tree, RngStream& rng) {
  if (tree.size() > kEnumerationCap) {
    throw ResourceError("GREM sampling beyond the enumeration cap");
  }
  const std::size_t leaves = std::size_t{1} << tree.size();
  std::vector<double> energies(leaves, 0.0);
  std::vector<double> branch;
  int depth = 0;
  for (int i = 0; i < tree.layers(); ++i) {
    depth += tree.exponents()[i];
    branch.resize(std::size_t{1} << depth);
    fill_standard_normal(rng, branch);
    const double scale = std::sqrt(tree.variances()[i]);
    const Word prefix = low_mask(depth);
    for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
      energies[leaf] += scale * branch[leaf & prefix];
    }
  }
  return DisorderDraw(tree.size(), std::move(energies));
}

std::vector<CoordinatePartition> layer_respecting_partitions(
    const GremTree& tree) {
  std::vector<CoordinatePartition> out;
  const int layers = tree.layers();
  std::vector<int> split(layers, 0);
  while (true) {
    Word mask = 0;
    int total = 0;
    for (int i = 0; i < layers; ++i) {
      mask |= low_mask(split[i]) << tree.layer_offset(i);
      total += split[i];
    }
    if (total >= 1 && total <= tree.size() - 1) out.emplace_back(tree.size(), mask);
    int i = 0;
    while (i < layers && split[i] == tree.exponents()[i]) split[i++] = 0;
    if (i == layers) break;
    ++split[i];
  }
  return out;
}

TreeLift::TreeLift(GremTree source, std::vector<int> target_exponents,
                   LiftPlacement placement)
    : source_(std::move(source)),
      target_([&] {
        if (target_exponents.size() != source_.exponents().size()) {
          throw ValidationError("lift must keep the number of layers");
        }
        for (std::size_t i = 0; i < target_exponents.size(); ++i) {
          if (target_exponents[i] < source_.exponents()[i]) {
            throw ValidationError(
                "lift exponents must not decrease: layer " +
                std::to_string(i + 1) + " goes from " +
                std::to_string(source_.exponents()[i]) + " to " +
                std::to_string(target_exponents[i]));
          }
        }
        const int n = std::accumulate(target_exponents.begin(),
                                      target_exponents.end(), 0);
        return GremTree(target_exponents, source_.variances(), n);
      }()),
      placement_(placement),
      mask_(0) {
  for (int i = 0; i < target_.layers(); ++i) {
    const int keep = source_.exponents()[i];
    int offset = target_.layer_offset(i);
    if (placement_ == LiftPlacement::kTrailing) {
      offset += target_.exponents()[i] - keep;
    }
    mask_ |= low_mask(keep) << offset;
  }
}

SpinConfig TreeLift::project(const SpinConfig& sigma) const {
  if (sigma.size() != target_.size()) {
    throw DimensionError("configuration size does not match lift target");
  }
  return SpinConfig(source_.size(), extract_bits(sigma.bits(), mask_));
}

std::optional<CoordinatePartition> TreeLift::partition() const {
  if (source_.size() == target_.size()) return std::nullopt;
  return CoordinatePartition(target_.size(), mask_);
}

DisorderDraw lift_tree(const TreeLift& lift, const DisorderDraw& source_draw) {
  if (source_draw.size() != lift.source().size()) {
    throw DimensionError("draw size does not match lift source");
  }
  const int n = lift.target().size();
  if (n > kEnumerationCap) throw ResourceError("lift target beyond enumeration cap");
  const std::size_t leaves = std::size_t{1} << n;
  std::vector<double> energies(leaves);
  for (std::size_t w = 0; w < leaves; ++w) {
    energies[w] = source_draw.energy(
        extract_bits(static_cast<Word>(w), lift.projection_mask()));
  }
  return DisorderDraw(n, std::move(energies), source_draw.provenance());
}

double lifted_covariance(const TreeLift& lift, const SpinConfig& sigma,
                         const SpinConfig& tau) {
  return grem_covariance(lift.source(), lift.project(sigma), lift.project(tau));
}

LiftInequalityReport check_lift_inequality(const TreeLift& lift) {
  const int n = lift.target().size();
  if (n > 12) throw ResourceError("lift inequality check is capped at N=12");
  LiftInequalityReport report;
  bool first = true;
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t s = 0; s < count; ++s) {
    const SpinConfig sigma(n, static_cast<Word>(s));
    for (std::size_t t = 0; t < count; ++t) {
      const SpinConfig tau(n, static_cast<Word>(t));
      const double margin =
          lifted_covariance(lift, sigma, tau) -
          lift.target().cumulative()[merge_level(lift.target(), sigma, tau)];
      if (first || margin < report.min_margin) {
        report.min_margin = margin;
        report.witness_sigma = sigma;
        report.witness_tau = tau;
        first = false;
      }
      ++report.pairs_checked;
    }
  }
  return report;
}

}  // namespace cgrem
