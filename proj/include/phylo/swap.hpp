#pragma once

#include <string>
#include <vector>

#include "phylo/phylogeny.hpp"

namespace phylo {

// A complete binary tree with equal weights, read off as its left-to-right leaf labels.
struct HomogeneousLayout {
  int h = 0;
  Units g_units = 0;
  Units upsilon = 1;
  // labeling[i] is the label at leaf position i; positions follow the heap order of build_homogeneous.
  std::vector<int> labeling;
};

// Throws std::invalid_argument unless t is rooted, complete and equal-weighted.
HomogeneousLayout homogeneous_layout(const Phylogeny& t);
// Heap index (root 0, children 2i+1, 2i+2) of every vertex of a homogeneous tree.
std::vector<int> heap_positions(const Phylogeny& t);

// Two same-level, non-sibling vertices given by heap index.
struct SwapMove {
  int u;
  int v;
};

Phylogeny swap_apply(const Phylogeny& t, SwapMove move);
std::vector<SwapMove> legal_swaps(int h);

// Metric-equivalence class identifier.
std::string swap_class_key(const Phylogeny& t);

struct SwapNeighborhood {
  long long raw_moves = 0;
  // Distinct classes reachable by one move, other than the class of t.
  std::vector<Phylogeny> neighbors;
};

SwapNeighborhood swap_neighbors(const Phylogeny& t);

inline constexpr int kSwapExactMaxLevels = 3;

// Breadth-first search over metric classes.
int swap_distance_exact(const Phylogeny& a, const Phylogeny& b);
// Number of classes within distance d of t, for d = 0..radius.
std::vector<long long> swap_ball_sizes(const Phylogeny& t, int radius);

}  // namespace phylo
