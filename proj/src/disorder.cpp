#include "cgrem/disorder.hpp"

#include <bit>
#include <ostream>
#include <string>

#include "cgrem/error.hpp"
#include "cgrem/factorization.hpp"
#include "cgrem/grem.hpp"

namespace cgrem {

CholeskyFactor::CholeskyFactor(const Eigen::MatrixXd& c) {
  const auto dim = static_cast<std::size_t>(c.rows());
  if (c.rows() != c.cols() || dim < 2 || !std::has_single_bit(dim)) {
    throw DimensionError("covariance must be square with side 2^N");
  }
  n_ = std::countr_zero(dim);
  if (!(asymmetry(c) <= 1e-12)) throw ValidationError("covariance is not symmetric");
  const PivotedCholesky chol = pivoted_cholesky(c, kCholeskyTruncation);
  const double scale = chol.max_diagonal > 0.0 ? chol.max_diagonal : 1.0;
  if (chol.residual_max_abs > 1e-8 * scale) {
    throw ValidationError("covariance is indefinite: residual " +
                          std::to_string(chol.residual_max_abs) +
                          " after rank " + std::to_string(chol.rank));
  }
  factor_ = chol.factor;
}

DisorderDraw sample_cholesky(const CholeskyFactor& factor, RngStream& rng) {
  Eigen::VectorXd g(factor.rank());
  fill_standard_normal(rng, g);
  Eigen::VectorXd e = factor.factor() * g;
  return DisorderDraw(factor.size(), std::vector<double>(e.data(), e.data() + e.size()));
}

DisorderDraw sample_cholesky(const Eigen::MatrixXd& c, RngStream& rng) {
  return sample_cholesky(CholeskyFactor(c), rng);
}

DisorderDraw sample_structural(const CouplingStructure& s, RngStream& rng) {
  std::vector<double> couplings(s.coupling_count());
  fill_standard_normal(rng, couplings);
  return DisorderDraw(s.size(), s.energies(couplings));
}

DisorderDraw sample_structural(const CovarianceModel& m, int n, RngStream& rng) {
  if (m.kind() == ModelKind::kGrem) {
    if (m.tree().size() != n) throw DimensionError("GREM tree size differs from requested N");
    DisorderDraw d = sample_grem(m.tree(), rng);
    d.set_provenance({m.name(), 0, 0});
    return d;
  }
  DisorderDraw d = sample_structural(coupling_structure(m, n), rng);
  d.set_provenance({m.name(), 0, 0});
  return d;
}

DisorderSampler::DisorderSampler(const CovarianceModel& m, int n,
                                 SamplingPath path)
    : name_(m.name()), n_(n), path_(path) {
  if (!m.supports_size(n)) {
    throw MissingDataError(m.name() + " is not defined at N=" + std::to_string(n));
  }
  if (path_ != SamplingPath::kCholesky) {
    try {
      structure_ = std::make_shared<const CouplingStructure>(coupling_structure(m, n));
      path_ = SamplingPath::kStructural;
    } catch (const UnsupportedError&) {
      if (path_ == SamplingPath::kStructural) throw;
    } catch (const ResourceError&) {
      if (path_ == SamplingPath::kStructural) throw;
    }
  }
  if (!structure_) {
    factor_ = std::make_shared<const CholeskyFactor>(build_covariance_matrix(m, n));
    path_ = SamplingPath::kCholesky;
  }
}

DisorderDraw DisorderSampler::draw(RngStream& rng) const {
  DisorderDraw d = structure_ ? sample_structural(*structure_, rng)
                              : sample_cholesky(*factor_, rng);
  d.set_provenance({name_, 0, 0});
  return d;
}

DisorderDraw lift(const DisorderDraw& draw, const CoordinatePartition& p,
                  Block block) {
  if (draw.size() != p.block_size(block)) {
    throw DimensionError("draw of size " + std::to_string(draw.size()) +
                         " cannot be lifted through a block of size " +
                         std::to_string(p.block_size(block)));
  }
  const int n = p.size();
  if (n > kEnumerationCap) throw ResourceError("lift beyond enumeration cap");
  const Word mask = p.block_mask(block);
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> energies(count);
  for (std::size_t w = 0; w < count; ++w) {
    energies[w] = draw.energy(extract_bits(static_cast<Word>(w), mask));
  }
  return DisorderDraw(n, std::move(energies), draw.provenance());
}

TripleSampler::TripleSampler(const CovarianceModel& m,
                             const CoordinatePartition& p, SamplingPath path)
    : partition_(p),
      whole_(m, p.size(), path),
      first_(submodel(m, p, Block::kFirst), p.first_size(), path),
      second_(submodel(m, p, Block::kSecond), p.second_size(), path) {}

JointTriple TripleSampler::draw(RngStream& rng) const {
  DisorderDraw whole = whole_.draw(rng);
  DisorderDraw first = first_.draw(rng);
  DisorderDraw second = second_.draw(rng);
  return {std::move(whole), lift(first, partition_, Block::kFirst),
          lift(second, partition_, Block::kSecond)};
}

JointTriple TripleSampler::draw(const SeedPolicy& seeds,
                                std::string_view experiment,
                                std::uint64_t index) const {
  const std::string label(experiment);
  auto make = [&](const DisorderSampler& sampler, const char* role) {
    const std::string stream_label = label + "/" + role;
    RngStream rng = seeds.stream(stream_label, index);
    DisorderDraw d = sampler.draw(rng);
    d.set_provenance({sampler.model_name(), seeds.stream_seed(stream_label, index), index});
    return d;
  };
  return {make(whole_, "whole"),
          lift(make(first_, "first"), partition_, Block::kFirst),
          lift(make(second_, "second"), partition_, Block::kSecond)};
}

JointTriple joint_triple(const CovarianceModel& m, const CoordinatePartition& p,
                         RngStream& rng) {
  return TripleSampler(m, p).draw(rng);
}

void write_draw(std::ostream& out, const DisorderDraw& draw) {
  const auto prec = out.precision(17);
  for (std::size_t i = 0; i < draw.energies().size(); ++i) {
    if (i) out << ' ';
    out << draw.energies()[i];
  }
  out << '\n';
  out.precision(prec);
}

}  // namespace cgrem
