#pragma once

#include <vector>

#include "phylo/blowup.hpp"
#include "phylo/subtree.hpp"

namespace phylo {

// `none` marks vertices that are not l-vertices.
enum class Color : std::uint8_t { none, green, red, yellow, black };

char color_letter(Color c);

// Bottom-up coloring of the l-vertices of a rooted reference tree against a candidate tree.
struct Coloring {
  TreeRef t0;
  TreeRef t_sharp;
  int ell = 2;
  std::vector<Color> color;
  // Index of the l-level: depth / l for internal vertices, ceil(depth / l) for leaves; -1 otherwise.
  std::vector<int> level;
  std::vector<int> ell_parent;
  std::vector<std::vector<int>> ell_children;
  // Leaf labels of the (would-be) G-cluster of each internal l-vertex without two non-G children.
  std::vector<std::vector<int>> cluster_labels;

  int count(Color c) const;
  std::vector<int> vertices(Color c) const;
  bool is_ell_vertex(int v) const { return color[v] != Color::none; }
  std::vector<int> green_children(int x) const;
  // G l-vertices that head a maximal G-cluster, in preorder.
  std::vector<int> maximal_cluster_roots() const;
};

// t0 must carry a root at an internal vertex (an unrooted t0 is rooted at its effective root).
Coloring color_vertices(const Phylogeny& t0, const Phylogeny& t_sharp, int ell);

// Vertices and edges on paths from x down to leaves through G l-vertices only, rooted at x.
RestrictedSubtree g_cluster(const Coloring& c, int x);
// Restriction of the candidate tree to the leaves of the cluster of x, rooted at the image of x.
// When x lies above the leaf span its image is undefined and the root is the image of the span top.
RestrictedSubtree matching_subtree(const Coloring& c, int x);

struct Overlap {
  // Maximal G-clusters with their candidate-tree restrictions.
  std::vector<int> cluster_roots;
  std::vector<RestrictedSubtree> clusters0;
  std::vector<RestrictedSubtree> clusters_sharp;
  // Per candidate-tree edge: number of maximal-cluster restrictions containing it.
  std::vector<int> multiplicity;
  std::vector<int> sharp_edges;  // multiplicity >= 2, sorted
  std::vector<int> t0_edges;     // cluster edges whose image path meets sharp_edges, sorted
  // Per reference-tree edge: owning maximal cluster (or -1) and its image path; edges above a
  // cluster's leaf span have an empty image path.
  std::vector<int> cluster_of_edge;
  std::vector<std::vector<int>> image_path;

  bool empty() const { return sharp_edges.empty(); }
};

Overlap compute_overlap(const Coloring& c);

// Rooting of a maximal cluster consistent with the candidate-tree root: parent of each cluster
// vertex (-1 at the top, -2 outside the cluster).
std::vector<int> consistent_parents(const Overlap& o, int cluster);

// Sum over overlap vertices y below x of 2^(-graph distance / 2).
double overlap_depth_sum(const Overlap& o, int cluster, int x);
// The threshold beta / (1 - 1/sqrt 2).
double shallow_threshold(double beta);
std::vector<int> shallow_vertices(const Overlap& o, int cluster, double beta);

struct UsefulEdge {
  int edge;            // reference-tree overlap edge
  int partner;         // shallow edge of another maximal cluster
  int shared;          // candidate-tree edge on both image paths
};

std::vector<UsefulEdge> useful_edges(const Overlap& o, double beta);

// R-vertices with a G-child whose cluster restriction meets the overlap become B.
Coloring recolor_black(const Coloring& c, const Overlap& o);

// Internal-vertex correspondence read off the maximal G-cluster matchings.
VertexMap cluster_vertex_map(const Coloring& c);
// Edge count minus the edges preserved by cluster_vertex_map.
int blowup_upper_bound(const Phylogeny& t0, const Phylogeny& t_sharp, int ell);

}  // namespace phylo
