#pragma once

#include <vector>

namespace phylo {

// Symmetric r-state rate matrix with uniform stationary law.
struct SubstitutionModel {
  int r = 2;

  double rate(int i, int j) const { return i == j ? -(r - 1.0) / r : 1.0 / r; }
  double stationary(int) const { return 1.0 / r; }
};

double delta_from_weight(double w, int r);

struct EdgeChannel {
  int r;
  double delta;
  double theta;
  std::vector<double> matrix;  // r x r, row-major

  double at(int i, int j) const { return matrix[i * r + j]; }
  double same() const { return 1.0 - (r - 1) * delta; }
};

EdgeChannel transition_matrix(double w, int r);

// Spin convention: state 0 is +1, state 1 is -1.
inline int spin_of(int state) { return state == 0 ? 1 : -1; }
inline int state_of(int spin) { return spin > 0 ? 0 : 1; }

}  // namespace phylo
