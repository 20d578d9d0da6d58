#include "cgrem/spin_space.hpp"

#include <bit>

#include "cgrem/error.hpp"

namespace cgrem {

namespace {

void require_size(int n) {
  if (n < 1 || n > kMaxSpins) {
    throw DimensionError("system size " + std::to_string(n) +
                         " outside [1, " + std::to_string(kMaxSpins) + "]");
  }
}

}  // namespace

SpinConfig::SpinConfig(int n, Word bits) : n_(n), bits_(bits) {
  require_size(n);
  if ((bits & ~low_mask(n)) != 0) {
    throw ValidationError("spin word has bits set above coordinate " +
                          std::to_string(n));
  }
}

SpinConfig SpinConfig::from_spins(const std::vector<int>& spins) {
  Word bits = 0;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] == 1) {
      bits |= Word{1} << i;
    } else if (spins[i] != -1) {
      throw ValidationError("spin values must be +1 or -1");
    }
  }
  return SpinConfig(static_cast<int>(spins.size()), bits);
}

SpinConfig SpinConfig::parse(std::string_view text) {
  std::vector<int> spins;
  for (char c : text) {
    if (c == '+') {
      spins.push_back(1);
    } else if (c == '-') {
      spins.push_back(-1);
    } else {
      throw ValidationError("unexpected character '" + std::string(1, c) +
                            "' in spin string");
    }
  }
  return from_spins(spins);
}

int SpinConfig::spin(int i) const {
  if (i < 0 || i >= n_) throw DimensionError("spin coordinate out of range");
  return (bits_ >> i) & 1U ? 1 : -1;
}

std::vector<int> SpinConfig::spins() const {
  std::vector<int> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = spin(i);
  return out;
}

std::string SpinConfig::to_string() const {
  std::string out(n_, '-');
  for (int i = 0; i < n_; ++i) {
    if ((bits_ >> i) & 1U) out[i] = '+';
  }
  return out;
}

CoordinatePartition::CoordinatePartition(int n, Word mask)
    : n_(n), mask_(mask), n1_(std::popcount(mask)) {
  require_size(n);
  if ((mask & ~low_mask(n)) != 0) {
    throw ValidationError("partition mask selects coordinates beyond n");
  }
  if (n1_ < 1 || n1_ > n - 1) {
    throw ValidationError("both partition blocks must be nonempty (n=" +
                          std::to_string(n) +
                          ", n1=" + std::to_string(n1_) + ")");
  }
}

CoordinatePartition CoordinatePartition::prefix(int n, int n1) {
  if (n1 < 1 || n1 > n - 1) {
    throw ValidationError("prefix split needs 1 <= n1 <= n-1");
  }
  return CoordinatePartition(n, low_mask(n1));
}

CoordinatePartition CoordinatePartition::from_first_block(
    int n, const std::vector<int>& coords) {
  Word mask = 0;
  for (int c : coords) {
    if (c < 1 || c > n) throw ValidationError("coordinate out of range");
    mask |= Word{1} << (c - 1);
  }
  return CoordinatePartition(n, mask);
}

std::string CoordinatePartition::to_string() const {
  std::string first = "{";
  std::string second = "{";
  for (int i = 0; i < n_; ++i) {
    std::string& target = ((mask_ >> i) & 1U) ? first : second;
    if (target.size() > 1) target += ',';
    target += std::to_string(i + 1);
  }
  return first + "}|" + second + "}";
}

Word extract_bits(Word word, Word mask) {
  Word out = 0;
  int pos = 0;
  while (mask != 0) {
    const int bit = std::countr_zero(mask);
    out |= ((word >> bit) & 1U) << pos;
    ++pos;
    mask &= mask - 1;
  }
  return out;
}

Word deposit_bits(Word packed, Word mask) {
  Word out = 0;
  int pos = 0;
  while (mask != 0) {
    const int bit = std::countr_zero(mask);
    out |= ((packed >> pos) & 1U) << bit;
    ++pos;
    mask &= mask - 1;
  }
  return out;
}

SpinConfig project(const SpinConfig& sigma, const CoordinatePartition& p,
                   Block block) {
  if (sigma.size() != p.size()) {
    throw DimensionError("configuration size " + std::to_string(sigma.size()) +
                         " does not match partition size " +
                         std::to_string(p.size()));
  }
  return SpinConfig(p.block_size(block),
                    extract_bits(sigma.bits(), p.block_mask(block)));
}

SpinConfig join(const SpinConfig& first, const SpinConfig& second,
                const CoordinatePartition& p) {
  if (first.size() != p.first_size() || second.size() != p.second_size()) {
    throw DimensionError("block sizes do not match partition");
  }
  return SpinConfig(p.size(),
                    deposit_bits(first.bits(), p.block_mask(Block::kFirst)) |
                        deposit_bits(second.bits(),
                                     p.block_mask(Block::kSecond)));
}

Overlap overlap(const SpinConfig& sigma, const SpinConfig& tau) {
  if (sigma.size() != tau.size()) {
    throw DimensionError("overlap of configurations with different sizes");
  }
  const int n = sigma.size();
  const int disagreements = std::popcount(sigma.bits() ^ tau.bits());
  return {n - 2 * disagreements, n};
}

std::vector<SpinConfig> enumerate_configs(int n, int cap) {
  require_size(n);
  if (n > cap) {
    throw ResourceError("enumeration of 2^" + std::to_string(n) +
                        " configurations exceeds cap 2^" +
                        std::to_string(cap));
  }
  std::vector<SpinConfig> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  out.reserve(count);
  for (std::uint64_t w = 0; w < count; ++w) {
    out.emplace_back(n, static_cast<Word>(w));
  }
  return out;
}

std::vector<CoordinatePartition> enumerate_partitions(int n,
                                                      PartitionMode mode) {
  if (n < 2) throw ValidationError("no valid split for n < 2");
  require_size(n);
  std::vector<CoordinatePartition> out;
  if (mode == PartitionMode::kCanonical) {
    for (int n1 = 1; n1 < n; ++n1) out.push_back(CoordinatePartition::prefix(n, n1));
    return out;
  }
  if (n > kEnumerationCap) {
    throw ResourceError("enumerating all partitions exceeds cap");
  }
  const Word full = low_mask(n);
  for (Word mask = 1; mask < full; ++mask) out.emplace_back(n, mask);
  return out;
}

}  // namespace cgrem
