#include <doctest.h>

#include <algorithm>
#include <random>
#include <bit>
#include <set>

#include "cgrem/error.hpp"
#include "cgrem/spin_space.hpp"
#include "oracles.hpp"

using namespace cgrem;

TEST_CASE("projection picks the block coordinates in order") {
  const SpinConfig s = SpinConfig::parse("++--");
  const auto p = CoordinatePartition::prefix(4, 2);
  CHECK(project(s, p, Block::kFirst).to_string() == "++");
  CHECK(project(s, p, Block::kSecond).to_string() == "--");

  const auto swapped = CoordinatePartition::from_first_block(2, {2});
  CHECK(project(SpinConfig::parse("+-"), swapped, Block::kFirst).to_string() == "-");
  CHECK(swapped.to_string() == "{2}|{1}");
}

TEST_CASE("overlap examples") {
  CHECK(overlap(SpinConfig::parse("+-+"), SpinConfig::parse("+-+")).value() == 1.0);
  CHECK(overlap(SpinConfig::parse("++"), SpinConfig::parse("+-")).numerator == 0);
  const Overlap q = overlap(SpinConfig::parse("+++"), SpinConfig::parse("+--"));
  CHECK(q.numerator == -1);
  CHECK(q.n == 3);
  CHECK_THROWS_AS(overlap(SpinConfig::parse("++"), SpinConfig::parse("+++")), DimensionError);
}

TEST_CASE("enumeration order and caps") {
  const auto one = enumerate_configs(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0].to_string() == "-");
  CHECK(one[1].to_string() == "+");

  const auto two = enumerate_configs(2);
  std::set<Word> seen;
  for (const auto& s : two) seen.insert(s.bits());
  CHECK(seen.size() == 4);

  CHECK(enumerate_configs(10).size() == 1024);
  CHECK_THROWS_AS(enumerate_configs(21), ResourceError);
  CHECK_THROWS_AS(enumerate_configs(0), DimensionError);
}

TEST_CASE("partition enumeration") {
  const auto c3 = enumerate_partitions(3, PartitionMode::kCanonical);
  REQUIRE(c3.size() == 2);
  CHECK(c3[0].to_string() == "{1}|{2,3}");
  CHECK(c3[1].to_string() == "{1,2}|{3}");
  CHECK(enumerate_partitions(3, PartitionMode::kAll).size() == 6);
  CHECK(enumerate_partitions(2, PartitionMode::kCanonical).size() == 1);
  CHECK_THROWS_AS(enumerate_partitions(1, PartitionMode::kCanonical), ValidationError);
  CHECK_THROWS_AS(CoordinatePartition(3, 0), ValidationError);
  CHECK_THROWS_AS(CoordinatePartition(3, 7), ValidationError);
}

TEST_CASE("parse rejects malformed strings") {
  CHECK_THROWS_AS(SpinConfig::parse("+x-"), ValidationError);
  CHECK_THROWS_AS(SpinConfig::parse(""), Error);
  CHECK(SpinConfig::from_spins({1, -1, 1}).to_string() == "+-+");
}

TEST_CASE("property: join inverts the projections") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 15);
    Word mask = 0;
    while (mask == 0 || mask == low_mask(n)) mask = static_cast<Word>(rng()) & low_mask(n);
    const CoordinatePartition p(n, mask);
    const SpinConfig s(n, static_cast<Word>(rng()) & low_mask(n));
    const SpinConfig a = project(s, p, Block::kFirst);
    const SpinConfig b = project(s, p, Block::kSecond);
    CHECK(a.size() == p.first_size());
    CHECK(join(a, b, p) == s);
  }
}

TEST_CASE("property: overlap splits into weighted block overlaps") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 12);
    Word mask = 0;
    while (mask == 0 || mask == low_mask(n)) mask = static_cast<Word>(rng()) & low_mask(n);
    const CoordinatePartition p(n, mask);
    const SpinConfig s(n, static_cast<Word>(rng()) & low_mask(n));
    const SpinConfig t(n, static_cast<Word>(rng()) & low_mask(n));
    const Overlap whole = overlap(s, t);
    const Overlap q1 = overlap(project(s, p, Block::kFirst), project(t, p, Block::kFirst));
    const Overlap q2 = overlap(project(s, p, Block::kSecond), project(t, p, Block::kSecond));
    CHECK(whole.numerator == q1.numerator + q2.numerator);
    const auto ref = oracle::overlap(oracle::spins_of(s.bits(), n), oracle::spins_of(t.bits(), n));
    CHECK(oracle::Rational(whole.numerator, n) == ref);
    CHECK(std::abs(whole.value()) <= 1.0);
  }
}

TEST_CASE("property: deposit and extract are inverse on the mask") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const Word mask = static_cast<Word>(rng()) & low_mask(20);
    const int k = std::popcount(mask);
    const Word packed = static_cast<Word>(rng()) & low_mask(k);
    CHECK(extract_bits(deposit_bits(packed, mask), mask) == packed);
    CHECK((deposit_bits(packed, mask) & ~mask) == 0u);
  }
}
