#include "phylo/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "phylo/enumerate.hpp"

namespace phylo {

Phylogeny blowup_apply(const Phylogeny& t, const BlowupMove& move) {
  int nv = t.num_vertices();
  std::vector<char> removed(t.num_edges(), 0);
  for (int e : move.removed) {
    if (e < 0 || e >= t.num_edges() || removed[e]) throw std::invalid_argument("bad removed edge");
    removed[e] = 1;
  }
  if (move.added.size() != move.removed.size()) throw std::invalid_argument("a move adds as many edges as it removes");
  std::vector<Edge> edges;
  for (int e = 0; e < t.num_edges(); ++e)
    if (!removed[e]) edges.push_back(t.edge(e));
  int top = nv;
  for (const auto& a : move.added) {
    if (a.u < 0 || a.v < 0 || a.u == a.v) throw std::invalid_argument("bad added edge");
    top = std::max({top, a.u + 1, a.v + 1});
    edges.push_back({a.u, a.v, a.units});
  }
  std::vector<int> degree(top, 0);
  for (const auto& e : edges) ++degree[e.u], ++degree[e.v];
  std::vector<int> id(top, -1);
  int next = 0;
  for (int v = 0; v < top; ++v)
    if (degree[v] > 0 || (v < nv && t.is_leaf(v))) id[v] = next++;
  for (auto& e : edges) e.u = id[e.u], e.v = id[e.v];
  std::vector<int> leaves(t.num_leaves());
  for (int a = 0; a < t.num_leaves(); ++a) leaves[a] = id[t.leaf_vertex(a)];
  return Phylogeny::from_edges(next, std::move(edges), std::move(leaves), t.upsilon());
}

namespace {

void check_pair(const Phylogeny& a, const Phylogeny& b) {
  if (a.num_leaves() != b.num_leaves()) throw std::invalid_argument("leaf sets differ");
  if (a.upsilon() != b.upsilon()) throw std::invalid_argument("trees use different grids");
  if (a.root() && a.degree(*a.root()) == 2) throw std::invalid_argument("suppress the root first");
  if (b.root() && b.degree(*b.root()) == 2) throw std::invalid_argument("suppress the root first");
}

// image[v] for every vertex of a, -1 when unmapped.
std::vector<int> full_image(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal) {
  std::vector<int> image(a.num_vertices(), -1);
  std::vector<char> used(b.num_vertices(), 0);
  for (int l = 0; l < a.num_leaves(); ++l) {
    image[a.leaf_vertex(l)] = b.leaf_vertex(l);
    used[b.leaf_vertex(l)] = 1;
  }
  for (auto [x, y] : internal) {
    if (a.is_leaf(x) || b.is_leaf(y)) throw std::invalid_argument("vertex map must pair internal vertices");
    if (image[x] >= 0 || used[y]) throw std::invalid_argument("vertex map is not injective");
    image[x] = y;
    used[y] = 1;
  }
  return image;
}

bool kept(const Phylogeny& a, const Phylogeny& b, const std::vector<int>& image, int e) {
  const Edge& ed = a.edge(e);
  if (image[ed.u] < 0 || image[ed.v] < 0) return false;
  int f = b.edge_between(image[ed.u], image[ed.v]);
  return f >= 0 && b.edge(f).units == ed.units;
}

}  // namespace

int preserved_edges(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal) {
  auto image = full_image(a, b, internal);
  int count = 0;
  for (int e = 0; e < a.num_edges(); ++e) count += kept(a, b, image, e);
  return count;
}

int blowup_bound_from_map(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal) {
  check_pair(a, b);
  return a.num_edges() - preserved_edges(a, b, internal);
}

BlowupMove move_from_map(const Phylogeny& a, const Phylogeny& b, const VertexMap& internal) {
  check_pair(a, b);
  auto image = full_image(a, b, internal);
  std::vector<int> preimage(b.num_vertices(), -1);
  for (int v = 0; v < a.num_vertices(); ++v)
    if (image[v] >= 0) preimage[image[v]] = v;
  BlowupMove move;
  std::vector<char> covered(b.num_edges(), 0);
  for (int e = 0; e < a.num_edges(); ++e) {
    if (kept(a, b, image, e)) {
      covered[b.edge_between(image[a.edge(e).u], image[a.edge(e).v])] = 1;
    } else {
      move.removed.push_back(e);
    }
  }
  // Unmatched vertices of b become new vertices.
  int fresh = a.num_vertices();
  for (int w = 0; w < b.num_vertices(); ++w)
    if (preimage[w] < 0) preimage[w] = fresh++;
  for (int f = 0; f < b.num_edges(); ++f)
    if (!covered[f]) move.added.push_back({preimage[b.edge(f).u], preimage[b.edge(f).v], b.edge(f).units});
  return move;
}

BlowupSolution blowup_solve_exact(const Phylogeny& a0, const Phylogeny& b0) {
  Phylogeny a = a0.unrooted(), b = b0.unrooted();
  check_pair(a, b);
  if (a.num_leaves() > kBlowupExactMaxLeaves) throw std::length_error("exact blow-up distance is limited to n <= 8");
  std::vector<int> ia, ib;
  for (int v = 0; v < a.num_vertices(); ++v)
    if (!a.is_leaf(v)) ia.push_back(v);
  for (int v = 0; v < b.num_vertices(); ++v)
    if (!b.is_leaf(v)) ib.push_back(v);
  std::vector<int> image(a.num_vertices(), -1);
  for (int l = 0; l < a.num_leaves(); ++l) image[a.leaf_vertex(l)] = b.leaf_vertex(l);
  std::vector<char> used(b.num_vertices(), 0);
  int base = 0;
  for (int e = 0; e < a.num_edges(); ++e) base += kept(a, b, image, e);

  std::vector<int> order(a.num_vertices(), -1);
  for (size_t i = 0; i < ia.size(); ++i) order[ia[i]] = static_cast<int>(i);
  int best = -1;
  std::vector<int> best_image;
  // Each unassigned internal vertex of a can still add at most its three edges.
  std::function<void(size_t, int)> rec = [&](size_t i, int score) {
    if (score + 3 * static_cast<int>(ia.size() - i) <= best) return;
    if (i == ia.size()) {
      best = score;
      best_image = image;
      return;
    }
    int x = ia[i];
    auto gain = [&] {
      int g = 0;
      // Each edge counts once, when its later endpoint is assigned.
      for (const auto& adj : a.neighbors(x))
        if ((a.is_leaf(adj.vertex) || order[adj.vertex] < static_cast<int>(i)) && kept(a, b, image, adj.edge)) ++g;
      return g;
    };
    for (int y : ib) {
      if (used[y]) continue;
      used[y] = 1;
      image[x] = y;
      rec(i + 1, score + gain());
      image[x] = -1;
      used[y] = 0;
    }
    rec(i + 1, score);
  };
  rec(0, base);

  BlowupSolution sol;
  sol.distance = a.num_edges() - best;
  for (int x : ia)
    if (best_image[x] >= 0) sol.map.push_back({x, best_image[x]});
  return sol;
}

int blowup_distance_exact(const Phylogeny& a, const Phylogeny& b) { return blowup_solve_exact(a, b).distance; }

double blowup_neighborhood_bound(int n, Units g_units, int radius) {
  return std::pow(12.0 * static_cast<double>(g_units) * n * n, radius);
}

long long blowup_ball_size(const Phylogeny& t, int radius, Units f_units, Units g_units) {
  int n = t.num_leaves();
  if (n < 3 || n > 5) throw std::length_error("blow-up balls are enumerated for 3 <= n <= 5 only");
  int edges = 2 * n - 3;
  Units width = g_units - f_units + 1;
  double total = static_cast<double>(double_factorial(2 * n - 5)) * std::pow(static_cast<double>(width), edges);
  if (width < 1 || total > 5e6) throw std::length_error("blow-up ball enumeration is too large");
  long long count = 0;
  for (const auto& topo : all_topologies(n, f_units, t.upsilon())) {
    std::vector<Units> units(edges, f_units);
    while (true) {
      std::vector<Edge> es(topo.edges().begin(), topo.edges().end());
      for (int e = 0; e < edges; ++e) es[e].units = units[e];
      std::vector<int> leaves(n);
      for (int a = 0; a < n; ++a) leaves[a] = topo.leaf_vertex(a);
      auto cand = Phylogeny::from_edges(topo.num_vertices(), std::move(es), std::move(leaves), t.upsilon());
      count += blowup_distance_exact(t, cand) <= radius;
      int e = 0;
      while (e < edges && ++units[e] > g_units) units[e++] = f_units;
      if (e == edges) break;
    }
  }
  return count;
}

bool blowup_neighborhood_count_check(const Phylogeny& t, int radius, Units f_units, Units g_units) {
  return static_cast<double>(blowup_ball_size(t, radius, f_units, g_units)) <=
         blowup_neighborhood_bound(t.num_leaves(), g_units, radius);
}

}  // namespace phylo
