#include "cgrem/audit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cgrem/error.hpp"
#include "cgrem/factorization.hpp"
#include "cgrem/parallel.hpp"

namespace cgrem {

namespace {

Rational rational_pow(const Rational& x, int p) {
  Rational r = 1;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void require_block_sizes(const CovarianceModel& m, const CoordinatePartition& p,
                         const CovarianceModel& first,
                         const CovarianceModel& second) {
  const int sizes[] = {p.size(), p.first_size(), p.second_size()};
  const CovarianceModel* models[] = {&m, &first, &second};
  for (int i = 0; i < 3; ++i) {
    if (!models[i]->supports_size(sizes[i])) {
      throw MissingDataError(m.name() + " cannot be evaluated at N=" +
                             std::to_string(sizes[i]) +
                             "; the condition needs sizes N, N1 and N2");
    }
  }
}

// Representative pair with d1 / d2 disagreements in the two blocks.
std::pair<SpinConfig, SpinConfig> representative(const CoordinatePartition& p,
                                                 int d1, int d2) {
  const Word full = low_mask(p.size());
  const Word flips = deposit_bits(low_mask(d1), p.block_mask(Block::kFirst)) |
                     deposit_bits(low_mask(d2), p.block_mask(Block::kSecond));
  return {SpinConfig(p.size(), full), SpinConfig(p.size(), full ^ flips)};
}

Verdict worse(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::kViolated: return 2;
      case Verdict::kHolds: return 1;
      case Verdict::kHoldsWithEquality: return 0;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "HOLDS";
    case Verdict::kViolated: return "VIOLATED";
    case Verdict::kHoldsWithEquality: return "HOLDS_WITH_EQUALITY";
  }
  return "?";
}

std::optional<Rational> exact_covariance(const CovarianceModel& m,
                                         const SpinConfig& sigma,
                                         const SpinConfig& tau) {
  if (sigma.size() != tau.size()) throw DimensionError("covariance of configurations with different sizes");
  switch (m.kind()) {
    case ModelKind::kSkFull:
    case ModelKind::kSkStandard:
    case ModelKind::kPSpin: {
      const Overlap q = overlap(sigma, tau);
      return rational_pow(Rational(q.numerator, q.n), m.order());
    }
    case ModelKind::kRem:
      return Rational(sigma == tau ? 1 : 0);
    default:
      return std::nullopt;
  }
}

double condition_gap(const CovarianceModel& m, const CoordinatePartition& p,
                     const SpinConfig& sigma, const SpinConfig& tau) {
  if (sigma.size() != p.size() || tau.size() != p.size()) {
    throw DimensionError("configuration size does not match partition");
  }
  const CovarianceModel first = submodel(m, p, Block::kFirst);
  const CovarianceModel second = submodel(m, p, Block::kSecond);
  require_block_sizes(m, p, first, second);
  const double n = p.size();
  return covariance(m, sigma, tau) -
         (p.first_size() / n) *
             covariance(first, project(sigma, p, Block::kFirst),
                        project(tau, p, Block::kFirst)) -
         (p.second_size() / n) *
             covariance(second, project(sigma, p, Block::kSecond),
                        project(tau, p, Block::kSecond));
}

std::optional<Rational> exact_condition_gap(const CovarianceModel& m,
                                            const CoordinatePartition& p,
                                            const SpinConfig& sigma,
                                            const SpinConfig& tau) {
  if (sigma.size() != p.size() || tau.size() != p.size()) {
    throw DimensionError("configuration size does not match partition");
  }
  auto whole = exact_covariance(m, sigma, tau);
  if (!whole) return std::nullopt;
  auto first = exact_covariance(m, project(sigma, p, Block::kFirst),
                                project(tau, p, Block::kFirst));
  auto second = exact_covariance(m, project(sigma, p, Block::kSecond),
                                 project(tau, p, Block::kSecond));
  return *whole - Rational(p.first_size(), p.size()) * *first -
         Rational(p.second_size(), p.size()) * *second;
}

Eigen::MatrixXd gap_matrix(const CovarianceModel& m,
                           const CoordinatePartition& p) {
  const int n = p.size();
  if (n > kAuditCap) throw ResourceError("gap matrix beyond audit cap");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd out(dim, dim);
  if (m.overlap_symmetric()) {
    const int n1 = p.first_size();
    const int n2 = p.second_size();
    std::vector<double> table((n1 + 1) * (n2 + 1));
    for (int d1 = 0; d1 <= n1; ++d1) {
      for (int d2 = 0; d2 <= n2; ++d2) {
        auto [s, t] = representative(p, d1, d2);
        const auto exact = exact_condition_gap(m, p, s, t);
        table[d1 * (n2 + 1) + d2] =
            exact ? static_cast<double>(*exact) : condition_gap(m, p, s, t);
      }
    }
    const Word m1 = p.block_mask(Block::kFirst);
    const Word m2 = p.block_mask(Block::kSecond);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        const Word x = static_cast<Word>(i ^ j);
        out(i, j) = table[std::popcount(x & m1) * (n2 + 1) + std::popcount(x & m2)];
      }
    }
    return out;
  }
  const CovarianceModel first = submodel(m, p, Block::kFirst);
  const CovarianceModel second = submodel(m, p, Block::kSecond);
  require_block_sizes(m, p, first, second);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const SpinConfig s(n, static_cast<Word>(i));
    const SpinConfig s1 = project(s, p, Block::kFirst);
    const SpinConfig s2 = project(s, p, Block::kSecond);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const SpinConfig t(n, static_cast<Word>(j));
      out(i, j) = covariance(m, s, t) -
                  (p.first_size() / double(n)) *
                      covariance(first, s1, project(t, p, Block::kFirst)) -
                  (p.second_size() / double(n)) *
                      covariance(second, s2, project(t, p, Block::kSecond));
    }
  }
  return out;
}

double default_gap_tolerance(const CovarianceModel& m) {
  return m.kind() == ModelKind::kCustom ? kCustomGapTolerance : kExactGapTolerance;
}

std::vector<CoordinatePartition> audit_partitions(const CovarianceModel& m,
                                                  int n, PartitionMode mode) {
  if (m.kind() == ModelKind::kGrem) {
    if (n != m.tree().size()) {
      throw DimensionError("GREM tree has N=" + std::to_string(m.tree().size()) +
                           ", audit requested N=" + std::to_string(n));
    }
    if (mode == PartitionMode::kCanonical) return layer_respecting_partitions(m.tree());
  }
  return enumerate_partitions(n, mode);
}

ConditionReport check_partition(const CovarianceModel& m,
                                const CoordinatePartition& p,
                                std::optional<double> tolerance) {
  const int n = p.size();
  if (n > kAuditCap) {
    throw ResourceError("audit of N=" + std::to_string(n) + " exceeds cap N=" +
                        std::to_string(kAuditCap));
  }
  ConditionReport report;
  report.n = n;
  report.partition = p;
  report.tolerance = tolerance.value_or(default_gap_tolerance(m));

  const std::uint64_t count = std::uint64_t{1} << n;
  report.pairs_checked = count * count;

  // Exact path: gaps of overlap-symmetric rational models depend only on
  // the disagreement counts in each block.
  if (m.overlap_symmetric() && exact_covariance(m, SpinConfig(1, 0), SpinConfig(1, 0))) {
    const int n2 = p.second_size();
    std::vector<Rational> table((p.first_size() + 1) * (n2 + 1));
    for (int d1 = 0; d1 <= p.first_size(); ++d1) {
      for (int d2 = 0; d2 <= n2; ++d2) {
        auto [s, t] = representative(p, d1, d2);
        table[d1 * (n2 + 1) + d2] = *exact_condition_gap(m, p, s, t);
      }
    }
    // Rank the cells once so the pair loop compares integers.
    std::vector<std::size_t> order(table.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return table[a] < table[b]; });
    std::vector<std::size_t> rank(table.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[order[r]] = (r > 0 && table[order[r]] == table[order[r - 1]])
                           ? rank[order[r - 1]]
                           : r;
    }
    const Word m1 = p.block_mask(Block::kFirst);
    const Word m2 = p.block_mask(Block::kSecond);
    std::size_t best = 0;
    std::size_t lowest = 0;
    std::uint64_t best_pair = 0;
    bool all_zero = true;
    for (std::uint64_t s = 0; s < count; ++s) {
      for (std::uint64_t t = 0; t < count; ++t) {
        const Word x = static_cast<Word>(s ^ t);
        const std::size_t cell = std::popcount(x & m1) * (n2 + 1) + std::popcount(x & m2);
        if ((s | t) == 0 || rank[cell] > rank[best]) {
          best = cell;
          best_pair = s * count + t;
        }
        if ((s | t) == 0 || rank[cell] < rank[lowest]) lowest = cell;
      }
    }
    // Every cell is reachable, so equality holds everywhere iff the table
    // is identically zero.
    for (const auto& g : table) {
      if (g != 0) all_zero = false;
    }
    report.exact_max_gap = table[best];
    report.max_gap = static_cast<double>(table[best]);
    report.min_gap = static_cast<double>(table[lowest]);
    report.witness_sigma = SpinConfig(n, static_cast<Word>(best_pair / count));
    report.witness_tau = SpinConfig(n, static_cast<Word>(best_pair % count));
    if (report.max_gap > report.tolerance) {
      report.verdict = Verdict::kViolated;
    } else {
      report.verdict = all_zero ? Verdict::kHoldsWithEquality : Verdict::kHolds;
    }
    return report;
  }

  const Eigen::MatrixXd gaps = gap_matrix(m, p);
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  report.max_gap = gaps(0, 0);
  report.min_gap = gaps(0, 0);
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < gaps.rows(); ++i) {
    for (Eigen::Index j = 0; j < gaps.cols(); ++j) {
      const double g = gaps(i, j);
      if (g > report.max_gap) {
        report.max_gap = g;
        bi = i;
        bj = j;
      }
      report.min_gap = std::min(report.min_gap, g);
      max_abs = std::max(max_abs, std::abs(g));
    }
  }
  report.witness_sigma = SpinConfig(n, static_cast<Word>(bi));
  report.witness_tau = SpinConfig(n, static_cast<Word>(bj));
  if (report.max_gap > report.tolerance) {
    report.verdict = Verdict::kViolated;
  } else {
    report.verdict = max_abs <= report.tolerance ? Verdict::kHoldsWithEquality
                                                 : Verdict::kHolds;
  }
  return report;
}

AuditResult check_condition(const CovarianceModel& m, int n,
                            PartitionMode mode,
                            std::optional<double> tolerance,
                            unsigned threads) {
  if (n > kAuditCap) {
    throw ResourceError("audit of N=" + std::to_string(n) + " exceeds cap N=" +
                        std::to_string(kAuditCap));
  }
  return check_condition(m, n, audit_partitions(m, n, mode), tolerance, threads);
}

AuditResult check_condition(const CovarianceModel& m, int n,
                            const std::vector<CoordinatePartition>& partitions,
                            std::optional<double> tolerance,
                            unsigned threads) {
  for (const auto& p : partitions) {
    if (p.size() != n) throw DimensionError("partition size differs from audit size");
  }
  AuditResult result;
  result.reports.resize(partitions.size());
  parallel_for(partitions.size(), threads, [&](std::size_t i) {
    result.reports[i] = check_partition(m, partitions[i], tolerance);
  });
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    result.verdict = worse(result.verdict, result.reports[i].verdict);
    if (result.reports[i].max_gap > result.reports[result.worst].max_gap) result.worst = i;
  }
  return result;
}

PsdReport validate_psd(const Eigen::MatrixXd& matrix, double tolerance) {
  if (matrix.rows() != matrix.cols()) throw DimensionError("matrix is not square");
  if (matrix.size() == 0) return {0.0, true, 0};
  if (!(asymmetry(matrix) <= 1e-12)) {
    throw ValidationError("matrix is not symmetric within 1e-12");
  }
  const PivotedCholesky chol = pivoted_cholesky(matrix, tolerance);
  const double scale = chol.max_diagonal > 0.0 ? chol.max_diagonal : 1.0;
  PsdReport report;
  report.rank = chol.rank;
  const bool full = chol.rank == matrix.rows();
  report.psd = full || chol.residual_max_abs <= tolerance * scale;
  if (full) {
    report.min_eigenvalue_estimate = chol.min_pivot;
  } else {
    report.min_eigenvalue_estimate =
        chol.rank == 0 ? chol.residual_min_diagonal
                       : std::min(chol.min_pivot, chol.residual_min_diagonal);
  }
  return report;
}

}  // namespace cgrem
