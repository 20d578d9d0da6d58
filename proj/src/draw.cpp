#include "cgrem/draw.hpp"

#include <cmath>

#include "cgrem/error.hpp"

namespace cgrem {

DisorderDraw::DisorderDraw(int n, std::vector<double> energies,
                           Provenance provenance)
    : n_(n), energies_(std::move(energies)), provenance_(std::move(provenance)) {
  if (n < 1 || n >= 63 || energies_.size() != (std::size_t{1} << n)) {
    throw DimensionError("a draw of size " + std::to_string(n) + " needs 2^" +
                         std::to_string(n) + " energies, got " +
                         std::to_string(energies_.size()));
  }
}

}  // namespace cgrem
