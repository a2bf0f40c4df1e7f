#pragma once

// Frozen regression pairs and test-side generators. All trees use upsilon = 10.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phylo/newick.hpp"
#include "phylo/phylogeny.hpp"
#include "phylo/rng.hpp"
#include "phylo/swap.hpp"

namespace instances {

inline constexpr phylo::Units kUpsilon = 10;

struct Pair {
  phylo::Phylogeny reference;
  phylo::Phylogeny candidate;
};

inline Pair from_newick(const std::string& a, const std::string& b) {
  return {phylo::parse_newick(a, kUpsilon), phylo::parse_newick(b, kUpsilon)};
}

// h = 4, every edge 0.2; leaves with labels 0 and 4 (heap 15 and 19) exchanged.
inline Pair single_swap() {
  auto t0 = phylo::build_homogeneous(4, 2, kUpsilon);
  return {t0, phylo::swap_apply(t0, {15, 19})};
}

// Non-co-hanging many-R pair whose candidate distance exceeds 2 g l (l = 2, g = 0.3).
inline Pair many_r_far() {
  return from_newick("(1:0.3,((((2:0.3,(3:0.2,4:0.3):0.3):0.3,6:0.3):0.2,5:0.3):0.2,7:0.3):0.1,8:0.2);",
                     "(1:0.3,(((2:0.3,(3:0.2,(4:0.1,7:0.3):0.2):0.3):0.3,6:0.3):0.2,5:0.3):0.3,8:0.2);");
}

// Non-co-hanging many-R pair within 2 g l in the candidate tree.
inline Pair many_r_close() {
  return from_newick("(1:0.1,(2:0.1,(((4:0.3,8:0.1):0.3,(5:0.3,6:0.1):0.2):0.3,7:0.2):0.2):0.2,3:0.1);",
                     "(1:0.1,((2:0.1,7:0.1):0.1,((4:0.3,8:0.1):0.3,(5:0.3,6:0.1):0.2):0.3):0.2,3:0.1);");
}

// Clusters {1..4} and {5..8} interleaved through two shared candidate edges; l = 2.
inline Pair two_cluster_overlap() {
  const std::string right = "(((9:0.2,10:0.2):0.2,(11:0.2,12:0.2):0.2):0.2,((13:0.2,14:0.2):0.2,(15:0.2,16:0.2):0.2):0.2):0.2";
  return from_newick(
      "((((1:0.2,2:0.2):0.2,(3:0.2,4:0.2):0.2):0.2,((5:0.2,6:0.2):0.2,(7:0.2,8:0.2):0.2):0.2):0.2," + right + ");",
      "((((1:0.2,2:0.2):0.1,(5:0.2,6:0.2):0.1):0.1,((3:0.2,4:0.2):0.1,(7:0.2,8:0.2):0.1):0.1):0.2," + right + ");");
}

// Depth-2 subtrees under different depth-1 vertices exchanged; the root becomes the only R-vertex.
inline Pair deep_swap() {
  auto t0 = phylo::build_homogeneous(4, 2, kUpsilon);
  return {t0, phylo::swap_apply(t0, {3, 5})};
}

// One labeling per metric class of h = 3 homogeneous trees (315 classes).
inline std::vector<std::vector<int>> h3_classes() {
  std::vector<int> lab(8);
  std::iota(lab.begin(), lab.end(), 0);
  std::map<std::string, std::vector<int>> seen;
  do {
    seen.emplace(phylo::swap_class_key(phylo::build_homogeneous(3, 2, 10, lab)), lab);
  } while (std::next_permutation(lab.begin(), lab.end()));
  std::vector<std::vector<int>> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

// Reference: root joined to complete trees A and B of the given height.
// Candidate: A and B share their top `shared` levels. Joint edges 0.1, hanging edges 0.1, others 0.2;
// A and B keep their reference metric. Meant for l = 1.
inline Pair interleaved(int height, int shared) {
  int half = 1 << height;
  auto w = [](int units) { return ":0." + std::to_string(units); };
  // Subtree of a side with first leaf `first`, `span` leaves, at reference depth d below its root.
  std::function<std::string(int, int, int)> side = [&](int first, int span, int d) -> std::string {
    if (span == 1) return std::to_string(first);
    // A reference edge into level `shared` absorbs the joint edge and the hanging edge.
    auto child = [&](int f) { return side(f, span / 2, d + 1) + w(d + 1 < shared ? 1 : 2); };
    return "(" + child(first) + "," + child(first + span / 2) + ")";
  };
  std::string reference = "(" + side(1, half, 0) + ":0.1," + side(half + 1, half, 0) + ":0.1);";
  std::function<std::string(int, int, int)> joint = [&](int offset, int span, int level) -> std::string {
    if (level == shared)
      return "(" + side(1 + offset, span, level) + w(1) + "," + side(half + 1 + offset, span, level) + w(1) + ")";
    return "(" + joint(offset, span / 2, level + 1) + w(1) + "," + joint(offset + span / 2, span / 2, level + 1) +
           w(1) + ")";
  };
  std::string candidate = joint(0, half, 0) + ";";
  return from_newick(reference, candidate);
}

// Random subtree prune-and-regraft; new edges get 1..3 units. Returns nullopt for an illegal pick.
inline std::optional<phylo::Phylogeny> random_spr(const phylo::Phylogeny& t, phylo::Rng& rng) {
  using namespace phylo;
  RootedView view(t, t.effective_root());
  int nv = t.num_vertices();
  int v = rng.below(nv);
  int p = view.parent[v];
  if (p < 0 || view.parent[p] < 0) return std::nullopt;
  int pp = view.parent[p];
  int s = -1;
  for (auto [x, e] : t.neighbors(p))
    if (x != v && x != pp) s = x;
  std::vector<int> targets;
  for (int e = 0; e < t.num_edges(); ++e) {
    const Edge& ed = t.edge(e);
    if (ed.u == p || ed.v == p) continue;
    int low = view.depth[ed.u] > view.depth[ed.v] ? ed.u : ed.v;
    if (view.is_ancestor(v, low)) continue;
    targets.push_back(e);
  }
  if (targets.empty() || s < 0) return std::nullopt;
  int target = targets[rng.below(static_cast<int>(targets.size()))];
  std::vector<Edge> edges;
  for (int e = 0; e < t.num_edges(); ++e) {
    const Edge& ed = t.edge(e);
    if (ed.u == p || ed.v == p || e == target) continue;
    edges.push_back(ed);
  }
  auto units = [&] { return static_cast<Units>(1 + rng.below(3)); };
  edges.push_back({pp, s, units()});
  edges.push_back({t.edge(target).u, p, units()});
  edges.push_back({p, t.edge(target).v, units()});
  edges.push_back({p, v, t.edge(t.edge_between(p, v)).units});
  std::vector<int> leaves(t.num_leaves());
  for (int a = 0; a < t.num_leaves(); ++a) leaves[a] = t.leaf_vertex(a);
  try {
    return Phylogeny::from_edges(nv, edges, leaves, t.upsilon());
  } catch (const InvalidTree&) {
    return std::nullopt;
  }
}

inline phylo::Phylogeny perturb(phylo::Phylogeny t, int moves, std::uint64_t seed) {
  phylo::Rng rng(seed);
  for (int done = 0; done < moves;)
    if (auto next = random_spr(t, rng)) {
      t = *next;
      ++done;
    }
  return t;
}

}  // namespace instances
