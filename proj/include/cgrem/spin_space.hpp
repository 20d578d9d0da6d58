#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cgrem {

// Bit-packed spin word. Bit i (0-based) holds coordinate i+1: set means +1.
using Word = std::uint32_t;

inline constexpr int kMaxSpins = 30;
inline constexpr int kEnumerationCap = 20;

inline constexpr Word low_mask(int n) {
  return n >= 32 ? ~Word{0} : (Word{1} << n) - 1;
}

// One configuration sigma in Sigma_N.
class SpinConfig {
 public:
  SpinConfig(int n, Word bits);

  // Builds from a +1/-1 vector; coordinate order is preserved.
  static SpinConfig from_spins(const std::vector<int>& spins);
  // Parses "+-+" style strings.
  static SpinConfig parse(std::string_view text);

  int size() const { return n_; }
  Word bits() const { return bits_; }
  // Index into a 2^n table ordered like enumerate_configs.
  std::size_t index() const { return bits_; }

  // 0-based coordinate, returns +1 or -1.
  int spin(int i) const;
  std::vector<int> spins() const;
  std::string to_string() const;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  int n_;
  Word bits_;
};

enum class Block { kFirst = 1, kSecond = 2 };

// Split of the N coordinates into two nonempty complementary blocks. The
// mask marks coordinates that belong to the first block.
class CoordinatePartition {
 public:
  CoordinatePartition(int n, Word mask);

  // {1..n1} | {n1+1..n}
  static CoordinatePartition prefix(int n, int n1);
  // 1-based coordinate list for the first block.
  static CoordinatePartition from_first_block(int n,
                                              const std::vector<int>& coords);

  int size() const { return n_; }
  Word mask() const { return mask_; }
  int first_size() const { return n1_; }
  int second_size() const { return n_ - n1_; }
  int block_size(Block b) const {
    return b == Block::kFirst ? first_size() : second_size();
  }
  Word block_mask(Block b) const {
    return b == Block::kFirst ? mask_ : (~mask_ & low_mask(n_));
  }

  // "{1,2}|{3,4}"
  std::string to_string() const;

  friend bool operator==(const CoordinatePartition&,
                         const CoordinatePartition&) = default;

 private:
  int n_;
  Word mask_;
  int n1_;
};

// Exact overlap q = numerator / n, numerator = agreements - disagreements.
struct Overlap {
  int numerator = 0;
  int n = 1;

  double value() const { return static_cast<double>(numerator) / n; }
  friend bool operator==(const Overlap&, const Overlap&) = default;
};

// Gathers the bits of `word` selected by `mask` into the low bits, keeping
// their relative order.
Word extract_bits(Word word, Word mask);
// Inverse of extract_bits: spreads the low bits of `packed` onto `mask`.
Word deposit_bits(Word packed, Word mask);

SpinConfig project(const SpinConfig& sigma, const CoordinatePartition& p,
                   Block block);
// Reassembles sigma from its two projections.
SpinConfig join(const SpinConfig& first, const SpinConfig& second,
                const CoordinatePartition& p);

Overlap overlap(const SpinConfig& sigma, const SpinConfig& tau);

std::vector<SpinConfig> enumerate_configs(int n, int cap = kEnumerationCap);

enum class PartitionMode { kCanonical, kAll };

// kCanonical: the n-1 contiguous prefixes. kAll: every nonempty proper
// subset as first block, so each unordered split appears twice.
std::vector<CoordinatePartition> enumerate_partitions(int n,
                                                      PartitionMode mode);

}  // namespace cgrem
