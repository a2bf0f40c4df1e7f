#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "phylo/phylogeny.hpp"
#include "phylo/tree_metric.hpp"

namespace phylo {

// A phylogeny together with a fixed root used for "up", "below" and toppings.
struct RootedTree {
  Phylogeny tree;
  RootedView view;
  TreeMetric metric;

  explicit RootedTree(Phylogeny t);
  RootedTree(Phylogeny t, int root);
};

using TreeRef = std::shared_ptr<const RootedTree>;
TreeRef make_rooted(Phylogeny t);
TreeRef make_rooted(Phylogeny t, int root);

// A vertex, or an interior point of an edge at `offset` units from edge.u.
struct Point {
  int vertex = -1;
  int edge = -1;
  Units offset = 0;

  static Point at(int v) { return {v, -1, 0}; }
  bool is_vertex() const { return vertex >= 0; }
  bool operator==(const Point&) const = default;
};

Point normalize(const Phylogeny& t, Point p);
Units point_distance(const RootedTree& t, Point p, Point q);
// Edge count between the nearest endpoints.
int point_graph_distance(const RootedTree& t, Point p, Point q);
// Edges touched by the p-q path, including partially covered ones; sorted.
std::vector<int> point_path_edges(const RootedTree& t, Point p, Point q);
// The point on the path from vertex a to vertex b at `from_a` units from a.
Point locate_on_path(const RootedTree& t, int a, int b, Units from_a);
// Highest vertex at or above p.
int vertex_at_or_above(const RootedTree& t, Point p);

struct RestrictedSubtree {
  TreeRef ref;
  std::vector<int> edges;   // sorted edge ids
  std::vector<int> labels;  // sorted leaf labels
  std::optional<Point> root;

  const Phylogeny& tree() const { return ref->tree; }
  bool has_edge(int e) const;
  // Vertices incident to retained edges; a single vertex for edgeless subtrees.
  std::vector<int> vertices() const;
};

RestrictedSubtree restrict_to(const TreeRef& t, std::vector<int> labels, const std::vector<int>& extra_vertices = {});
RestrictedSubtree with_root(RestrictedSubtree y, Point root);
// Top of the span with respect to the tree root.
Point top_of(const RestrictedSubtree& y);

bool is_metric_matching(const RestrictedSubtree& y, const RestrictedSubtree& y2);
// Image in y2's tree of a point in y's span; nullopt when the leaf metric does not pin it down.
std::optional<Point> image_point(const RestrictedSubtree& y, const RestrictedSubtree& y2, Point p);

struct ShapeNode {
  int parent = -1;
  Units units = 0;  // length of the edge to the parent
  int label = -1;
  std::vector<int> children;
};

// Rooted view of a restricted subtree; node 0 is the root and parents precede children.
struct RootedShape {
  Units upsilon = 1;
  std::vector<ShapeNode> nodes;

  int num_leaves() const;
  std::vector<int> leaf_labels() const;
  int height() const;
};

RootedShape shape_of(const RestrictedSubtree& y);
// The whole tree hanging from vertex `root`.
RootedShape shape_of(const Phylogeny& t, int root);
RootedShape suppress_unary(const RootedShape& s);
// The l-completion: leaves padded with zero-length complete binary subtrees to the
// smallest multiple of l exceeding the height.
RootedShape ell_completion(const RootedShape& s, int ell);
std::vector<double> level_populations(const RootedShape& s, int ell);
bool is_dense(const RootedShape& s, int ell, int wp);
bool is_dense(const RestrictedSubtree& y, int ell, int wp);

struct SubtreeIntersection : std::logic_error {
  using std::logic_error::logic_error;
};

std::vector<int> edge_intersection(const RestrictedSubtree& y, const RestrictedSubtree& z);
// Throws SubtreeIntersection when the edge sets meet.
bool is_cohanging(const RestrictedSubtree& y, const RestrictedSubtree& z);
std::vector<int> linkage(const RestrictedSubtree& y, const RestrictedSubtree& z);
std::vector<int> topping(const RestrictedSubtree& y, int gamma);

}  // namespace phylo
