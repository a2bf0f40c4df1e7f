#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phylo {

// Edge lengths are integer multiples of 1/upsilon.
using Units = std::int64_t;

struct InvalidTree : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  int u;
  int v;
  Units units;
};

struct Adjacent {
  int vertex;
  int edge;
};

class Phylogeny {
 public:
  Phylogeny() = default;

  // leaf_vertex[a] is the vertex carrying label a.
  static Phylogeny from_edges(int num_vertices, std::vector<Edge> edges, std::vector<int> leaf_vertex,
                              Units upsilon, std::optional<int> root = std::nullopt);

  int num_vertices() const { return static_cast<int>(adj_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_leaves() const { return static_cast<int>(leaf_vertex_.size()); }
  Units upsilon() const { return upsilon_; }

  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Adjacent> neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  int leaf_vertex(int label) const { return leaf_vertex_.at(label); }
  // -1 for internal vertices.
  int label_of(int v) const { return label_[v]; }
  bool is_leaf(int v) const { return label_[v] >= 0; }

  double weight(int e) const { return static_cast<double>(edges_[e].units) / upsilon_; }
  int other_end(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }
  // Edge joining u and v, or -1.
  int edge_between(int u, int v) const;

  std::optional<int> root() const { return root_; }
  // Vertex used when an algorithm needs some root.
  int effective_root() const;

  Phylogeny with_root(std::optional<int> root) const;
  // Suppresses a degree-2 root by merging its two edges.
  Phylogeny unrooted() const;
  Phylogeny with_units(int e, Units units) const;

  bool is_regular(Units f_units, Units g_units) const;

 private:
  Units upsilon_ = 1;
  std::vector<Edge> edges_;
  std::vector<std::vector<Adjacent>> adj_;
  std::vector<int> leaf_vertex_;
  std::vector<int> label_;
  std::optional<int> root_;
};

// Converts a real weight to grid units; throws unless it lies on the grid.
Units to_units(double w, Units upsilon);

// Complete binary tree with 2^h leaves; labeling[i] is the label of the i-th leaf left to right.
Phylogeny build_homogeneous(int h, Units g_units, Units upsilon, const std::vector<int>& labeling);
Phylogeny build_homogeneous(int h, Units g_units, Units upsilon);

// Parent pointers, depths and distances from a chosen root.
struct RootedView {
  int root = -1;
  std::vector<int> parent;
  std::vector<int> parent_edge;
  std::vector<int> depth;
  std::vector<Units> dist;
  std::vector<int> preorder;
  std::vector<std::vector<int>> children;

  RootedView() = default;
  RootedView(const Phylogeny& t, int root);

  int lca(int a, int b) const;
  int graph_distance(int a, int b) const;
  Units distance(int a, int b) const;
  bool is_ancestor(int a, int b) const;  // a on the path from root to b
  // Edges on the path between two vertices.
  std::vector<int> path_edges(int a, int b) const;
  // Vertices on the path, a first.
  std::vector<int> path_vertices(int a, int b) const;
};

// Topology-only canonical string: rooted at leaf 0, children ordered by minimum leaf label.
std::string canonical_topology(const Phylogeny& t);
// Same with weights included; equal strings iff weight- and label-preserving isomorphism.
std::string canonical_form(const Phylogeny& t);

}  // namespace phylo
