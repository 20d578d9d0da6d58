#include <doctest.h>

#include <cmath>

#include "cgrem/audit.hpp"
#include "cgrem/error.hpp"
#include "cgrem/interpolation.hpp"
#include "cgrem/thermo.hpp"
#include "oracles.hpp"

using namespace cgrem;

namespace {

SamplingOptions options(std::size_t samples, std::uint64_t seed) {
  SamplingOptions o;
  o.samples = samples;
  o.seeds = SeedPolicy(seed);
  return o;
}

// ln Z of a block system evaluated on its own configuration space.
double block_log_partition(const DisorderDraw& lifted, const CoordinatePartition& p, Block b,
                           double beta) {
  const int nb = p.block_size(b);
  std::vector<double> e(std::size_t{1} << nb);
  for (const auto& s : enumerate_configs(p.size())) {
    e[project(s, p, b).index()] = lifted.energy(s.index());
  }
  std::vector<double> x(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) x[i] = beta * std::sqrt(double(nb)) * e[i];
  return oracle::log_sum_exp(x);
}

}  // namespace

TEST_CASE("interpolated Hamiltonian at the endpoints") {
  const auto p = CoordinatePartition::prefix(4, 2);
  RngStream rng(1);
  const JointTriple tr = joint_triple(CovarianceModel::sk(), p, rng);
  for (const auto& s : enumerate_configs(4)) {
    CHECK(interp_hamiltonian(tr, p, s, InterpolationPoint(1.0)) ==
          doctest::Approx(-2.0 * tr.whole.energy(s.index())));
    CHECK(interp_hamiltonian(tr, p, s, InterpolationPoint(0.0)) ==
          doctest::Approx(-std::sqrt(2.0) * (tr.first.energy(s.index()) + tr.second.energy(s.index()))));
  }
  const JointTriple zero{DisorderDraw(4, std::vector<double>(16, 0.0)),
                         DisorderDraw(4, std::vector<double>(16, 0.0)),
                         DisorderDraw(4, std::vector<double>(16, 0.0))};
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK(interp_hamiltonian(zero, p, SpinConfig::parse("+-+-"), InterpolationPoint(t)) == 0.0);
  }
  CHECK_THROWS_AS(InterpolationPoint(1.5), ValidationError);
  CHECK_THROWS_AS(InterpolationPoint(-0.1), ValidationError);
}

TEST_CASE("boundary identities of the interpolating partition function") {
  const auto p = CoordinatePartition::prefix(6, 2);
  const TripleSampler sampler(CovarianceModel::pspin(3), p);
  const SeedPolicy seeds(2);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const JointTriple tr = sampler.draw(seeds, "boundary", i);
    CHECK(std::abs(log_partition_t(tr, p, 1.3, InterpolationPoint(1.0)) -
                   log_partition(tr.whole, 1.3)) < 1e-10);
    const double split = block_log_partition(tr.first, p, Block::kFirst, 1.3) +
                         block_log_partition(tr.second, p, Block::kSecond, 1.3);
    CHECK(std::abs(log_partition_t(tr, p, 1.3, InterpolationPoint(0.0)) - split) < 1e-10);
    CHECK(log_partition_t(tr, p, 0.0, InterpolationPoint(0.4)) ==
          doctest::Approx(6 * std::log(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("two-replica weights") {
  const auto p = CoordinatePartition::prefix(3, 1);
  RngStream rng(4);
  const JointTriple tr = joint_triple(CovarianceModel::sk(), p, rng);
  const TwoReplicaGibbs g(tr, p, 1.0, InterpolationPoint(0.5));
  CHECK(g.total_weight() == doctest::Approx(1.0));
  CHECK(g.marginal().sum() == doctest::Approx(1.0));
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(8, 8);
  CHECK(g.expectation(ones) == doctest::Approx(1.0));
  const auto a = SpinConfig::parse("+-+"), b = SpinConfig::parse("--+");
  CHECK(g.weight(a, b) == doctest::Approx(g.marginal()(a.index()) * g.marginal()(b.index())));
  CHECK_THROWS_AS(g.expectation(Eigen::MatrixXd::Ones(4, 4)), DimensionError);
}

TEST_CASE("derivative estimator special cases") {
  const auto p = CoordinatePartition::prefix(4, 2);
  const auto zero_beta = derivative_estimator(CovarianceModel::sk(), p, 0.0, 0.5, options(10, 1));
  CHECK(zero_beta.value == 0.0);
  CHECK(zero_beta.std_error == 0.0);
  const auto field = derivative_estimator(CovarianceModel::pspin(1), p, 1.0, 0.3, options(200, 1));
  CHECK(std::abs(field.value) <= 3 * field.std_error + 1e-15);
}

TEST_CASE("derivative matches the finite difference") {
  const auto p = CoordinatePartition::prefix(4, 2);
  const auto r = finite_difference_check(CovarianceModel::sk(), p, 1.0, 0.5, 0.05, options(5000, 7));
  CHECK(r.agree);
  CHECK(r.derivative.value >= -3 * r.derivative.std_error);
  CHECK_FALSE(r.step_warning);
  const auto w = finite_difference_check(CovarianceModel::sk(), p, 1.0, 0.5, 0.2, options(50, 7));
  CHECK(w.step_warning);
  CHECK_THROWS_AS(finite_difference_check(CovarianceModel::sk(), p, 1.0, 0.02, 0.05, options(50, 7)),
                  ValidationError);
  const auto zero = finite_difference_check(CovarianceModel::sk(), p, 0.0, 0.5, 0.05, options(50, 7));
  CHECK(zero.derivative.value == 0.0);
  CHECK(zero.finite_difference.value == 0.0);
}

TEST_CASE("derivative equals an explicit replica average on one draw") {
  // With one draw the estimator is -(beta^2/2) sum w_s w_t gap(s,t); check
  // it against the Gibbs weights and the gap matrix by hand.
  const auto p = CoordinatePartition::prefix(3, 1);
  const auto m = CovarianceModel::pspin(3);
  const TripleSampler sampler(m, p);
  const SeedPolicy seeds(9);
  const JointTriple tr = sampler.draw(seeds, "manual", 0);
  const TwoReplicaGibbs g(tr, p, 1.5, InterpolationPoint(0.25));
  const Eigen::MatrixXd gap = gap_matrix(m, p);
  double direct = 0.0;
  for (Eigen::Index i = 0; i < gap.rows(); ++i)
    for (Eigen::Index j = 0; j < gap.cols(); ++j)
      direct += g.marginal()(i) * g.marginal()(j) * gap(i, j);
  CHECK(-0.5 * 1.5 * 1.5 * direct ==
        doctest::Approx(-0.5 * 1.5 * 1.5 * g.expectation(gap)).epsilon(1e-13));
}

TEST_CASE("monotonicity scan and odd p-spin") {
  const auto sk = monotonicity_scan(CovarianceModel::rem(), CoordinatePartition::prefix(4, 2), 1.0,
                                    {0.1, 0.5, 0.9}, options(500, 3));
  CHECK(sk.points.size() == 3);
  CHECK(sk.all_nonnegative);
  // Reported, not asserted: the odd model's derivative can turn negative.
  const auto odd = monotonicity_scan(CovarianceModel::pspin(3), CoordinatePartition::prefix(3, 1), 3.0,
                                     {0.1, 0.5, 0.9}, options(500, 3));
  double lowest = 1e9;
  for (const auto& pt : odd.points) lowest = std::min(lowest, pt.derivative.value);
  MESSAGE("pspin:3 N=3 N1=1 beta=3 lowest derivative " << lowest);
}

TEST_CASE("path integral reproduces the boundary margin") {
  const auto r = path_integral_check(CovarianceModel::sk(), CoordinatePartition::prefix(4, 2), 1.0, 9,
                                     options(2000, 11));
  CHECK(r.consistent);
  CHECK(r.grid_points == 9);
}
