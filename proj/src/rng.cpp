#include "cgrem/rng.hpp"

namespace cgrem {

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SeedPolicy::stream_seed(std::string_view experiment,
                                      std::uint64_t index) const {
  return mix64(mix64(mix64(master_) ^ label_hash(experiment)) ^ index);
}

RngStream SeedPolicy::stream(std::string_view experiment,
                             std::uint64_t index) const {
  std::seed_seq seq{stream_seed(experiment, index)};
  return RngStream(seq);
}

}  // namespace cgrem
