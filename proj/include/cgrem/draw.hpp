#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgrem {

struct Provenance {
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
};

// One disorder realization {E_sigma}, indexed like enumerate_configs.
class DisorderDraw {
 public:
  DisorderDraw(int n, std::vector<double> energies, Provenance provenance = {});

  int size() const { return n_; }
  const std::vector<double>& energies() const { return energies_; }
  double energy(std::size_t index) const { return energies_[index]; }
  const Provenance& provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

 private:
  int n_;
  std::vector<double> energies_;
  Provenance provenance_;
};

}  // namespace cgrem
