#pragma once

#include <vector>

#include "phylo/alignment.hpp"
#include "phylo/likelihood.hpp"
#include "phylo/phylogeny.hpp"

namespace phylo {

enum class MlMode { exhaustive, topology, candidates };

struct WeightGrid {
  Units f_units = 1;
  Units g_units = 1;
  Units upsilon = 10;

  std::vector<Units> values() const;
};

struct MlSpace {
  MlMode mode = MlMode::candidates;
  WeightGrid grid;
  std::vector<Phylogeny> candidates;
  int enumeration_limit = 8;
  long long max_candidates = 5'000'000;
};

struct MlResult {
  Phylogeny winner;
  LogLikelihood score;
  long long scored = 0;
  // Another candidate scored within tolerance of the winner.
  bool tie = false;
};

// Relative tolerance under which two scores count as tied.
inline constexpr double kScoreTieTolerance = 1e-9;
bool scores_tied(double a, double b);

MlResult ml_estimate(const Alignment& a, const MlSpace& space);

// Cyclic coordinate descent over the grid for a fixed topology.
Phylogeny optimize_branch_lengths(const Phylogeny& topology, const PatternCounts& data, const WeightGrid& grid,
                                  LogLikelihood* score = nullptr);

}  // namespace phylo
