#pragma once

#include <utility>
#include <vector>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Endpoints at or beyond the source vertex count name new vertices.
struct AddedEdge {
  int u;
  int v;
  Units units;
};

struct BlowupMove {
  std::vector<int> removed;  // edge ids of the source tree
  std::vector<AddedEdge> added;

  int size() const { return static_cast<int>(removed.size()); }
};

// Removes edges, adds edges, then drops isolated internal vertices. The result is unrooted.
Phylogeny blowup_apply(const Phylogeny& t, const BlowupMove& move);

inline constexpr int kBlowupExactMaxLeaves = 8;

// Pairs (vertex of a, vertex of b) between internal vertices; leaves map by label.
using VertexMap = std::vector<std::pair<int, int>>;

// Edges of a kept by the map: both ends mapped onto an equal-weight edge of b.
int preserved_edges(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal);
// The move that keeps exactly the preserved edges and rebuilds the rest of b.
BlowupMove move_from_map(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal);
// Number of edges minus the edges preserved by the map; never below the exact distance.
int blowup_bound_from_map(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal);

struct BlowupSolution {
  int distance;
  VertexMap map;
};

// Maximum common weighted edge subgraph over injections of internal vertices.
BlowupSolution blowup_solve_exact(const Phylogeny& a, const Phylogeny& b);
int blowup_distance_exact(const Phylogeny& a, const Phylogeny& b);

// Phylogenies on the grid [f, g] within the given distance of t, by enumeration.
long long blowup_ball_size(const Phylogeny& t, int radius, Units f_units, Units g_units);
// (12 g upsilon n^2)^radius.
double blowup_neighborhood_bound(int n, Units g_units, int radius);
bool blowup_neighborhood_count_check(const Phylogeny& t, int radius, Units f_units, Units g_units);

}  // namespace phylo
