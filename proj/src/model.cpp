#include "phylo/model.hpp"

#include <cmath>
#include <stdexcept>

namespace phylo {

double delta_from_weight(double w, int r) {
  if (r < 2) throw std::invalid_argument("r must be at least 2");
  if (!(w >= 0)) throw std::invalid_argument("negative weight");
  if (std::isinf(w)) return 1.0 / r;
  return -std::expm1(-w) / r;
}

EdgeChannel transition_matrix(double w, int r) {
  EdgeChannel c{r, delta_from_weight(w, r), std::exp(-w), std::vector<double>(static_cast<size_t>(r) * r)};
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) c.matrix[i * r + j] = i == j ? 1.0 - (r - 1) * c.delta : c.delta;
  return c;
}

}  // namespace phylo
