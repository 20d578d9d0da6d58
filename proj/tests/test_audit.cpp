#include <doctest.h>

#include <random>

#include "cgrem/audit.hpp"
#include "cgrem/error.hpp"
#include "oracles.hpp"

using namespace cgrem;

namespace {

std::vector<bool> first_block_flags(const CoordinatePartition& p) {
  std::vector<bool> flags(p.size());
  for (int i = 0; i < p.size(); ++i) flags[i] = (p.mask() >> i) & 1u;
  return flags;
}

// Exhaustive exact max gap and its first witness in sigma-major order.
struct OracleMax {
  oracle::Rational max;
  Word sigma = 0;
  Word tau = 0;
};

OracleMax oracle_max_gap(int p, const CoordinatePartition& part) {
  const int n = part.size();
  const auto flags = first_block_flags(part);
  OracleMax best{oracle::Rational(-100)};
  for (Word s = 0; s < (Word{1} << n); ++s)
    for (Word t = 0; t < (Word{1} << n); ++t) {
      const auto g = oracle::pspin_gap(p, oracle::spins_of(s, n), oracle::spins_of(t, n), flags);
      if (g > best.max) best = {g, s, t};
    }
  return best;
}

}  // namespace

TEST_CASE("gap examples") {
  const auto rem = CovarianceModel::rem();
  const auto split = CoordinatePartition::prefix(2, 1);
  const auto gap = exact_condition_gap(rem, split, SpinConfig::parse("++"), SpinConfig::parse("+-"));
  REQUIRE(gap);
  CHECK(*gap == Rational(-1, 2));
  CHECK(condition_gap(rem, split, SpinConfig::parse("++"), SpinConfig::parse("+-")) == -0.5);

  const auto p3 = CovarianceModel::pspin(3);
  const auto g3 = exact_condition_gap(p3, CoordinatePartition::prefix(3, 1),
                                      SpinConfig::parse("+++"), SpinConfig::parse("+--"));
  REQUIRE(g3);
  CHECK(*g3 == Rational(8, 27));
}

TEST_CASE("random field gaps vanish exactly") {
  const auto p1 = CovarianceModel::pspin(1);
  for (int n = 2; n <= 6; ++n) {
    for (const auto& part : enumerate_partitions(n, PartitionMode::kAll)) {
      const auto r = check_partition(p1, part);
      REQUIRE(r.exact_max_gap);
      CHECK(*r.exact_max_gap == 0);
      CHECK(r.min_gap == 0.0);
      CHECK(r.verdict == Verdict::kHoldsWithEquality);
    }
  }
}

TEST_CASE("even p-spin holds, odd p-spin is caught") {
  for (int n = 2; n <= 6; ++n) {
    const auto sk = check_condition(CovarianceModel::sk(), n, PartitionMode::kCanonical);
    CHECK(sk.verdict == Verdict::kHolds);
    for (const auto& r : sk.reports) CHECK(r.max_gap <= 0.0);
  }
  const auto odd = check_condition(CovarianceModel::pspin(3), 3, PartitionMode::kCanonical);
  CHECK(odd.verdict == Verdict::kViolated);
  const auto& worst = odd.reports[odd.worst];
  CHECK(worst.max_gap == doctest::Approx(8.0 / 27).epsilon(1e-12));
  CHECK(condition_gap(CovarianceModel::pspin(3), worst.partition, worst.witness_sigma,
                      worst.witness_tau) == doctest::Approx(worst.max_gap));
}

TEST_CASE("REM gaps: zero on the diagonal, minus the agreeing block share elsewhere") {
  for (int n = 2; n <= 5; ++n) {
    for (const auto& part : enumerate_partitions(n, PartitionMode::kCanonical)) {
      const Eigen::MatrixXd g = gap_matrix(CovarianceModel::rem(), part);
      const Word m1 = part.block_mask(Block::kFirst), m2 = part.block_mask(Block::kSecond);
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          const Word x = static_cast<Word>(i ^ j);
          double expected = 0.0;
          if (i != j) {
            if ((x & m1) == 0) expected -= double(part.first_size()) / n;
            if ((x & m2) == 0) expected -= double(part.second_size()) / n;
          }
          CHECK(g(i, j) == doctest::Approx(expected).epsilon(1e-15));
          CHECK(g(i, j) <= 0.0);
          if (i == j) CHECK(g(i, j) == 0.0);
        }
    }
  }
}

TEST_CASE("property: audit matches the brute-force rational oracle") {
  for (int p : {1, 2, 3, 4, 5}) {
    for (int n = 2; n <= 4; ++n) {
      for (const auto& part : enumerate_partitions(n, PartitionMode::kAll)) {
        const auto r = check_partition(CovarianceModel::pspin(p), part);
        const OracleMax o = oracle_max_gap(p, part);
        REQUIRE(r.exact_max_gap);
        CHECK(*r.exact_max_gap == o.max);
        CHECK(r.witness_sigma.bits() == o.sigma);
        CHECK(r.witness_tau.bits() == o.tau);
        CHECK(r.pairs_checked == (std::uint64_t{1} << (2 * n)));
      }
    }
  }
}

TEST_CASE("property: double gaps agree with exact gaps") {
  std::mt19937_64 rng(3);
  const std::vector<CovarianceModel> models = {CovarianceModel::sk(), CovarianceModel::pspin(3),
                                               CovarianceModel::rem()};
  for (int trial = 0; trial < 300; ++trial) {
    const auto& m = models[trial % models.size()];
    const int n = 2 + static_cast<int>(rng() % 8);
    Word mask = 0;
    while (mask == 0 || mask == low_mask(n)) mask = static_cast<Word>(rng()) & low_mask(n);
    const CoordinatePartition part(n, mask);
    const SpinConfig s(n, static_cast<Word>(rng()) & low_mask(n));
    const SpinConfig t(n, static_cast<Word>(rng()) & low_mask(n));
    const auto exact = exact_condition_gap(m, part, s, t);
    REQUIRE(exact);
    CHECK(condition_gap(m, part, s, t) == doctest::Approx(static_cast<double>(*exact)).epsilon(1e-13));
  }
}

TEST_CASE("mixed and custom models use the floating-point path") {
  const auto mixed = CovarianceModel::mixed(MixedCoefficients({{2, 0.5}, {4, 0.5}}));
  const auto r = check_partition(mixed, CoordinatePartition::prefix(4, 2));
  CHECK_FALSE(r.exact_max_gap);
  CHECK(r.verdict == Verdict::kHolds);

  CustomCovariance c;
  c.add(build_covariance_matrix(CovarianceModel::sk(), 2));
  c.add(build_covariance_matrix(CovarianceModel::sk(), 1));
  const auto custom = CovarianceModel::custom(c);
  const auto rc = check_partition(custom, CoordinatePartition::prefix(2, 1));
  CHECK(rc.tolerance == kCustomGapTolerance);
  CHECK(rc.verdict != Verdict::kViolated);
  CHECK_THROWS_AS(check_partition(custom, CoordinatePartition::prefix(3, 1)), MissingDataError);
}

TEST_CASE("audit caps and threading") {
  CHECK_THROWS_AS(check_condition(CovarianceModel::sk(), kAuditCap + 1, PartitionMode::kCanonical),
                  ResourceError);
  const auto a = check_condition(CovarianceModel::pspin(3), 5, PartitionMode::kAll, std::nullopt, 1);
  const auto b = check_condition(CovarianceModel::pspin(3), 5, PartitionMode::kAll, std::nullopt, 3);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].max_gap == b.reports[i].max_gap);
    CHECK(a.reports[i].witness_sigma == b.reports[i].witness_sigma);
  }
  CHECK(a.worst == b.worst);
}

TEST_CASE("PSD validation") {
  const auto rem = validate_psd(build_covariance_matrix(CovarianceModel::rem(), 3));
  CHECK(rem.psd);
  CHECK(rem.min_eigenvalue_estimate == doctest::Approx(1.0));
  const auto ones = validate_psd(Eigen::MatrixXd::Ones(2, 2));
  CHECK(ones.psd);
  CHECK(ones.rank == 1);
  CHECK(ones.min_eigenvalue_estimate == doctest::Approx(0.0));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_FALSE(validate_psd(indefinite).psd);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(validate_psd(asym), ValidationError);
}

TEST_CASE("property: PSD verdict agrees with the eigenvalue oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 12);
    const int rank = 1 + static_cast<int>(rng() % dim);
    Eigen::MatrixXd c = oracle::random_correlation(dim, rank, rng);
    if (trial % 2) {
      // Perturb; may or may not break semidefiniteness.
      const int i = static_cast<int>(rng() % dim), j = static_cast<int>(rng() % dim);
      if (i != j) c(i, j) = c(j, i) = c(i, j) + u(rng);
    }
    const double lambda = oracle::min_eigenvalue(c);
    if (std::abs(lambda) < 1e-6) continue;  // too close to call at this tolerance
    CHECK_MESSAGE(validate_psd(c).psd == (lambda > 0.0), "lambda=" << lambda);
  }
}
