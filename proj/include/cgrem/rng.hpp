#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cgrem {

using RngStream = std::mt19937_64;

// Stable 64-bit label hash (FNV-1a); std::hash is not stable across builds.
std::uint64_t label_hash(std::string_view label);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Counter-style stream derivation: draw `index` of experiment `label` is
// seeded from (master, label, index) alone, so draws can be generated in
// any order or on any thread.
class SeedPolicy {
 public:
  explicit SeedPolicy(std::uint64_t master_seed = 0) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_seed(std::string_view experiment,
                            std::uint64_t index) const;
  RngStream stream(std::string_view experiment, std::uint64_t index) const;

 private:
  std::uint64_t master_;
};

// Fills `out` with i.i.d. standard normals.
template <typename Range>
void fill_standard_normal(RngStream& rng, Range& out) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& x : out) x = gauss(rng);
}

}  // namespace cgrem
