#include "cgrem/models.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "cgrem/error.hpp"

namespace cgrem {

namespace {

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

double int_pow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void require_same_size(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() != b.size()) {
    throw DimensionError("covariance of configurations with sizes " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
}

// Number of ordered p-tuples over n coordinates, or 0 past the cap.
std::size_t tuple_count(int n, int p) {
  std::size_t count = 1;
  for (int i = 0; i < p; ++i) {
    if (count > kCouplingCap / static_cast<std::size_t>(n)) return 0;
    count *= static_cast<std::size_t>(n);
  }
  return count;
}

// Appends one Walsh term per ordered p-tuple; the mask keeps coordinates
// that occur an odd number of times.
void append_pspin_terms(int n, int p, double scale,
                        std::vector<CouplingStructure::WalshTerm>& terms) {
  std::vector<int> digits(p, 0);
  while (true) {
    Word mask = 0;
    for (int d : digits) mask ^= Word{1} << d;
    terms.push_back({mask, scale});
    int i = p - 1;
    while (i >= 0 && digits[i] == n - 1) digits[i--] = 0;
    if (i < 0) break;
    ++digits[i];
  }
}

}  // namespace

MixedCoefficients::MixedCoefficients(std::map<int, double> weights)
    : w_(std::move(weights)) {
  if (w_.empty()) throw ValidationError("mixed model needs at least one weight");
  double sum = 0.0;
  for (const auto& [p, w] : w_) {
    if (p < 1) throw ValidationError("interaction order must be >= 1, got " + std::to_string(p));
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("weight for p=" + std::to_string(p) +
                            " must be a finite nonnegative number");
    }
    sum += w;
  }
  if (!(std::abs(sum - 1.0) <= 1e-12)) {
    throw ValidationError("mixed weights sum to " + format_double(sum) +
                          ", expected 1");
  }
}

double MixedCoefficients::psi(double q) const {
  double out = 0.0;
  for (const auto& [p, w] : w_) out += w * int_pow(q, p);
  return out;
}

void CustomCovariance::add(Eigen::MatrixXd matrix) {
  const auto dim = matrix.rows();
  if (dim != matrix.cols() || dim < 2 || !std::has_single_bit(static_cast<std::size_t>(dim))) {
    throw ValidationError("custom covariance must be square with side 2^N, N >= 1");
  }
  const int n = std::countr_zero(static_cast<std::size_t>(dim));
  if (n > kMatrixCap) throw ResourceError("custom covariance exceeds matrix cap");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(std::abs(matrix(i, i) - 1.0) <= 1e-12)) {
      throw ValidationError("custom covariance diagonal entry " +
                            std::to_string(i) + " is not 1");
    }
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      if (!(std::abs(matrix(i, j) - matrix(j, i)) <= 1e-12)) {
        throw ValidationError("custom covariance is not symmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (by_size_.count(n) != 0) {
    throw ValidationError("duplicate custom covariance for N=" + std::to_string(n));
  }
  by_size_[n] = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
}

const Eigen::MatrixXd* CustomCovariance::at(int n) const {
  auto it = by_size_.find(n);
  return it == by_size_.end() ? nullptr : it->second.get();
}

std::vector<int> CustomCovariance::sizes() const {
  std::vector<int> out;
  for (const auto& [n, m] : by_size_) out.push_back(n);
  return out;
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  long dim = 0;
  if (!(in >> dim) || dim < 1) {
    throw ValidationError("matrix file: first line must be the dimension");
  }
  if (dim > (1L << kMatrixCap)) throw ResourceError("matrix file exceeds matrix cap");
  Eigen::MatrixXd m(dim, dim);
  for (long i = 0; i < dim; ++i) {
    for (long j = 0; j < dim; ++j) {
      if (!(in >> m(i, j))) {
        throw ValidationError("matrix file: missing entry (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

CovarianceModel::CovarianceModel(ModelKind kind, std::string name)
    : kind_(kind), name_(std::move(name)) {}

CovarianceModel CovarianceModel::sk() {
  CovarianceModel m(ModelKind::kSkFull, "sk");
  m.order_ = 2;
  return m;
}

CovarianceModel CovarianceModel::sk_standard() {
  CovarianceModel m(ModelKind::kSkStandard, "sk-standard");
  m.order_ = 2;
  return m;
}

CovarianceModel CovarianceModel::pspin(int p) {
  if (p < 1) throw ValidationError("p-spin order must be >= 1");
  CovarianceModel m(ModelKind::kPSpin, "pspin:" + std::to_string(p));
  m.order_ = p;
  return m;
}

CovarianceModel CovarianceModel::mixed(MixedCoefficients w) {
  std::string name = "mixed:";
  bool first = true;
  for (const auto& [p, weight] : w.weights()) {
    if (!first) name += ',';
    name += std::to_string(p) + "=" + format_double(weight);
    first = false;
  }
  CovarianceModel m(ModelKind::kMixed, std::move(name));
  m.data_ = std::move(w);
  return m;
}

CovarianceModel CovarianceModel::rem() {
  return CovarianceModel(ModelKind::kRem, "rem");
}

CovarianceModel CovarianceModel::grem(GremTree tree) {
  CovarianceModel m(ModelKind::kGrem, tree.to_string());
  m.data_ = std::move(tree);
  return m;
}

CovarianceModel CovarianceModel::custom(CustomCovariance matrices) {
  std::string name = "custom(n=";
  bool first = true;
  for (int n : matrices.sizes()) {
    if (!first) name += ',';
    name += std::to_string(n);
    first = false;
  }
  CovarianceModel m(ModelKind::kCustom, name + ")");
  m.data_ = std::move(matrices);
  return m;
}

std::string CovarianceModel::name() const { return name_; }

int CovarianceModel::order() const {
  if (order_ == 0) throw UnsupportedError(name_ + " has no single interaction order");
  return order_;
}

const MixedCoefficients& CovarianceModel::mixed_weights() const {
  if (kind_ != ModelKind::kMixed) throw UnsupportedError(name_ + " is not a mixed model");
  return std::get<MixedCoefficients>(data_);
}

const GremTree& CovarianceModel::tree() const {
  if (kind_ != ModelKind::kGrem) throw UnsupportedError(name_ + " is not a GREM model");
  return std::get<GremTree>(data_);
}

const CustomCovariance& CovarianceModel::custom_matrices() const {
  if (kind_ != ModelKind::kCustom) throw UnsupportedError(name_ + " is not a custom model");
  return std::get<CustomCovariance>(data_);
}

bool CovarianceModel::overlap_symmetric() const {
  return kind_ != ModelKind::kGrem && kind_ != ModelKind::kCustom;
}

bool CovarianceModel::supports_size(int n) const {
  switch (kind_) {
    case ModelKind::kGrem:
      return n == tree().size();
    case ModelKind::kCustom:
      return custom_matrices().at(n) != nullptr;
    default:
      return n >= 1 && n <= kMaxSpins;
  }
}

double covariance(const CovarianceModel& m, const SpinConfig& sigma,
                  const SpinConfig& tau) {
  require_same_size(sigma, tau);
  switch (m.kind()) {
    case ModelKind::kSkFull:
    case ModelKind::kSkStandard:
    case ModelKind::kPSpin:
      return int_pow(overlap(sigma, tau).value(), m.order());
    case ModelKind::kMixed:
      return m.mixed_weights().psi(overlap(sigma, tau).value());
    case ModelKind::kRem:
      return sigma == tau ? 1.0 : 0.0;
    case ModelKind::kGrem:
      return grem_covariance(m.tree(), sigma, tau);
    case ModelKind::kCustom: {
      const auto* c = m.custom_matrices().at(sigma.size());
      if (c == nullptr) {
        throw MissingDataError("custom model has no covariance matrix for N=" +
                               std::to_string(sigma.size()));
      }
      return (*c)(static_cast<Eigen::Index>(sigma.index()),
                  static_cast<Eigen::Index>(tau.index()));
    }
  }
  throw UnsupportedError("unknown model kind");
}

CovarianceModel submodel(const CovarianceModel& m,
                         const CoordinatePartition& p, Block block) {
  if (m.kind() != ModelKind::kGrem) return m;
  if (p.size() != m.tree().size()) {
    throw DimensionError("partition size does not match GREM tree size");
  }
  return CovarianceModel::grem(m.tree().induced(p.block_mask(block)));
}

Eigen::MatrixXd build_covariance_matrix(const CovarianceModel& m, int n,
                                        int cap) {
  if (n > cap) {
    throw ResourceError("covariance matrix for N=" + std::to_string(n) +
                        " exceeds cap N=" + std::to_string(cap));
  }
  if (m.kind() == ModelKind::kCustom) {
    const auto* c = m.custom_matrices().at(n);
    if (c == nullptr) {
      throw MissingDataError("custom model has no matrix for N=" + std::to_string(n));
    }
    return *c;
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd out(dim, dim);
  if (m.overlap_symmetric()) {
    // Entry depends only on the number of disagreeing coordinates.
    std::vector<double> by_distance(n + 1);
    for (int d = 0; d <= n; ++d) {
      by_distance[d] = covariance(m, SpinConfig(n, 0), SpinConfig(n, low_mask(d)));
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        out(i, j) = by_distance[std::popcount(static_cast<Word>(i ^ j))];
      }
    }
    return out;
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    const SpinConfig sigma(n, static_cast<Word>(i));
    for (Eigen::Index j = i; j < dim; ++j) {
      out(i, j) = out(j, i) = covariance(m, sigma, SpinConfig(n, static_cast<Word>(j)));
    }
  }
  return out;
}

CouplingStructure CouplingStructure::walsh(int n, std::vector<WalshTerm> terms,
                                           std::vector<BlockInfo> blocks) {
  CouplingStructure s;
  s.n_ = n;
  s.count_ = terms.size();
  s.walsh_ = std::move(terms);
  s.blocks_ = std::move(blocks);
  return s;
}

CouplingStructure CouplingStructure::tree(int n, std::vector<TreeLayer> layers) {
  CouplingStructure s;
  s.n_ = n;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::size_t branches = std::size_t{1} << layers[i].depth;
    s.count_ += branches;
    s.blocks_.push_back({"layer " + std::to_string(i + 1), branches, layers[i].scale});
  }
  s.tree_ = std::move(layers);
  return s;
}

std::vector<double> CouplingStructure::coefficients(const SpinConfig& sigma) const {
  if (sigma.size() != n_) throw DimensionError("configuration size does not match coupling structure");
  std::vector<double> row(count_, 0.0);
  if (!walsh_.empty()) {
    const Word minus = ~sigma.bits() & low_mask(n_);
    for (std::size_t c = 0; c < walsh_.size(); ++c) {
      const bool odd = std::popcount(walsh_[c].mask & minus) & 1;
      row[c] = odd ? -walsh_[c].scale : walsh_[c].scale;
    }
    return row;
  }
  std::size_t offset = 0;
  for (const auto& layer : tree_) {
    row[offset + (sigma.bits() & low_mask(layer.depth))] = layer.scale;
    offset += std::size_t{1} << layer.depth;
  }
  return row;
}

std::vector<double> CouplingStructure::energies(std::span<const double> couplings) const {
  if (couplings.size() != count_) throw DimensionError("coupling vector has wrong length");
  const std::size_t configs = std::size_t{1} << n_;
  std::vector<double> out(configs, 0.0);
  if (!walsh_.empty()) {
    std::vector<double> spectrum(configs, 0.0);
    for (std::size_t c = 0; c < walsh_.size(); ++c) {
      spectrum[walsh_[c].mask] += walsh_[c].scale * couplings[c];
    }
    walsh_hadamard(spectrum);
    const Word full = low_mask(n_);
    for (std::size_t w = 0; w < configs; ++w) {
      out[w] = spectrum[~static_cast<Word>(w) & full];
    }
    return out;
  }
  std::size_t offset = 0;
  for (const auto& layer : tree_) {
    const Word prefix = low_mask(layer.depth);
    for (std::size_t w = 0; w < configs; ++w) {
      out[w] += layer.scale * couplings[offset + (w & prefix)];
    }
    offset += std::size_t{1} << layer.depth;
  }
  return out;
}

void walsh_hadamard(std::span<double> values) {
  const std::size_t size = values.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t start = 0; start < size; start += 2 * half) {
      for (std::size_t i = start; i < start + half; ++i) {
        const double a = values[i];
        const double b = values[i + half];
        values[i] = a + b;
        values[i + half] = a - b;
      }
    }
  }
}

CouplingStructure coupling_structure(const CovarianceModel& m, int n) {
  if (n < 1 || n > kEnumerationCap) {
    throw ResourceError("structural sampling requires 1 <= N <= " +
                        std::to_string(kEnumerationCap));
  }
  std::vector<CouplingStructure::WalshTerm> terms;
  std::vector<CouplingStructure::BlockInfo> blocks;
  auto add_order = [&](int p, double weight) {
    const std::size_t count = tuple_count(n, p);
    if (count == 0 || terms.size() + count > kCouplingCap) {
      throw ResourceError("p=" + std::to_string(p) + " at N=" + std::to_string(n) +
                          " has too many couplings; use the Cholesky path");
    }
    const double scale = std::sqrt(weight) * std::pow(static_cast<double>(n), -0.5 * p);
    append_pspin_terms(n, p, scale, terms);
    blocks.push_back({"p=" + std::to_string(p), count, scale});
  };
  switch (m.kind()) {
    case ModelKind::kSkFull:
      add_order(2, 1.0);
      break;
    case ModelKind::kPSpin:
      add_order(m.order(), 1.0);
      break;
    case ModelKind::kMixed:
      for (const auto& [p, w] : m.mixed_weights().weights()) {
        if (w > 0.0) add_order(p, w);
      }
      break;
    case ModelKind::kRem:
      return CouplingStructure::tree(n, {{n, 1.0}});
    case ModelKind::kGrem: {
      const GremTree& t = m.tree();
      if (t.size() != n) throw DimensionError("GREM tree size differs from requested N");
      std::vector<CouplingStructure::TreeLayer> layers;
      int depth = 0;
      for (int i = 0; i < t.layers(); ++i) {
        depth += t.exponents()[i];
        layers.push_back({depth, std::sqrt(t.variances()[i])});
      }
      return CouplingStructure::tree(n, std::move(layers));
    }
    case ModelKind::kSkStandard:
      throw UnsupportedError(
          "sk-standard is not a unit-variance family; use sk_standard_structure");
    case ModelKind::kCustom:
      throw UnsupportedError("custom covariance has no structural form; use the Cholesky path");
  }
  return CouplingStructure::walsh(n, std::move(terms), std::move(blocks));
}

CouplingStructure sk_standard_structure(int n) {
  if (n < 2 || n > kEnumerationCap) throw ValidationError("sk-standard needs 2 <= N <= cap");
  std::vector<CouplingStructure::WalshTerm> terms;
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      terms.push_back({(Word{1} << i) | (Word{1} << j), scale});
    }
  }
  const std::size_t count = terms.size();
  return CouplingStructure::walsh(n, std::move(terms), {{"i<j", count, scale}});
}

}  // namespace cgrem
