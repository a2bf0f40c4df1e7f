#include "phylo/phylogeny.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace phylo {

Phylogeny Phylogeny::from_edges(int num_vertices, std::vector<Edge> edges, std::vector<int> leaf_vertex,
                                Units upsilon, std::optional<int> root) {
  if (upsilon < 1) throw InvalidTree("upsilon must be positive");
  if (num_vertices < 1) throw InvalidTree("empty tree");
  if (static_cast<int>(edges.size()) != num_vertices - 1) throw InvalidTree("edge count must be |V|-1");
  Phylogeny t;
  t.upsilon_ = upsilon;
  t.adj_.assign(num_vertices, {});
  t.label_.assign(num_vertices, -1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& ed = edges[e];
    if (ed.u < 0 || ed.v < 0 || ed.u >= num_vertices || ed.v >= num_vertices || ed.u == ed.v)
      throw InvalidTree("edge endpoint out of range");
    if (ed.units <= 0) throw InvalidTree("edge weights must be positive");
    t.adj_[ed.u].push_back({ed.v, e});
    t.adj_[ed.v].push_back({ed.u, e});
  }
  for (int a = 0; a < static_cast<int>(leaf_vertex.size()); ++a) {
    int v = leaf_vertex[a];
    if (v < 0 || v >= num_vertices || t.label_[v] != -1) throw InvalidTree("labeling is not a bijection");
    t.label_[v] = a;
  }
  if (leaf_vertex.empty()) throw InvalidTree("no leaves");
  if (root && (*root < 0 || *root >= num_vertices)) throw InvalidTree("root out of range");
  t.edges_ = std::move(edges);
  t.leaf_vertex_ = std::move(leaf_vertex);
  t.root_ = root;

  // Connectivity; with |E| = |V|-1 this also rules out cycles.
  std::vector<char> seen(num_vertices, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto [w, e] : t.adj_[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  if (count != num_vertices) throw InvalidTree("tree is not connected");

  for (int v = 0; v < num_vertices; ++v) {
    int d = t.degree(v);
    if (t.label_[v] >= 0) {
      if (d > 1) throw InvalidTree("leaf with degree > 1");
    } else if (d == 2) {
      if (!root || *root != v) throw InvalidTree("degree-2 vertex that is not the root");
    } else if (d != 3) {
      throw InvalidTree("internal vertex degree must be 3");
    }
  }
  return t;
}

int Phylogeny::edge_between(int u, int v) const {
  for (auto [w, e] : adj_[u])
    if (w == v) return e;
  return -1;
}

int Phylogeny::effective_root() const {
  if (root_) return *root_;
  int v = leaf_vertex_[0];
  return adj_[v].empty() ? v : adj_[v][0].vertex;
}

Phylogeny Phylogeny::with_root(std::optional<int> root) const {
  return from_edges(num_vertices(), edges_, leaf_vertex_, upsilon_, root);
}

Phylogeny Phylogeny::with_units(int e, Units units) const {
  auto edges = edges_;
  edges.at(e).units = units;
  return from_edges(num_vertices(), std::move(edges), leaf_vertex_, upsilon_, root_);
}

Phylogeny Phylogeny::unrooted() const {
  if (!root_ || degree(*root_) != 2 || is_leaf(*root_)) return with_root(std::nullopt);
  int r = *root_;
  auto [a, ea] = adj_[r][0];
  auto [b, eb] = adj_[r][1];
  std::vector<int> remap(num_vertices());
  int next = 0;
  for (int v = 0; v < num_vertices(); ++v) remap[v] = v == r ? -1 : next++;
  std::vector<Edge> edges;
  for (int e = 0; e < num_edges(); ++e)
    if (e != ea && e != eb) edges.push_back({remap[edges_[e].u], remap[edges_[e].v], edges_[e].units});
  edges.push_back({remap[a], remap[b], edges_[ea].units + edges_[eb].units});
  std::vector<int> leaves(leaf_vertex_.size());
  for (size_t i = 0; i < leaves.size(); ++i) leaves[i] = remap[leaf_vertex_[i]];
  return from_edges(next, std::move(edges), std::move(leaves), upsilon_);
}

bool Phylogeny::is_regular(Units f_units, Units g_units) const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.units >= f_units && e.units <= g_units; });
}

Units to_units(double w, Units upsilon) {
  if (!(w >= 0) || !std::isfinite(w)) throw InvalidTree("weight must be finite and non-negative");
  double x = w * upsilon;
  double r = std::round(x);
  if (std::abs(x - r) > 1e-6 * std::max(1.0, std::abs(x))) throw InvalidTree("weight is not on the 1/upsilon grid");
  return static_cast<Units>(r);
}

Phylogeny build_homogeneous(int h, Units g_units, Units upsilon, const std::vector<int>& labeling) {
  if (h < 0) throw InvalidTree("h must be non-negative");
  int n = 1 << h;
  if (static_cast<int>(labeling.size()) != n) throw InvalidTree("labeling length must be 2^h");
  std::vector<int> check(labeling);
  std::sort(check.begin(), check.end());
  for (int i = 0; i < n; ++i)
    if (check[i] != i) throw InvalidTree("labeling is not a permutation");
  // Heap layout: vertex i has children 2i+1, 2i+2; leaves are the last n vertices.
  int nv = 2 * n - 1;
  std::vector<Edge> edges;
  for (int v = 1; v < nv; ++v) edges.push_back({(v - 1) / 2, v, g_units});
  std::vector<int> leaf_vertex(n);
  for (int i = 0; i < n; ++i) leaf_vertex[labeling[i]] = n - 1 + i;
  return Phylogeny::from_edges(nv, std::move(edges), std::move(leaf_vertex), upsilon, 0);
}

Phylogeny build_homogeneous(int h, Units g_units, Units upsilon) {
  std::vector<int> id(1 << std::max(h, 0));
  for (int i = 0; i < static_cast<int>(id.size()); ++i) id[i] = i;
  return build_homogeneous(h, g_units, upsilon, id);
}

RootedView::RootedView(const Phylogeny& t, int r) : root(r) {
  int nv = t.num_vertices();
  parent.assign(nv, -1);
  parent_edge.assign(nv, -1);
  depth.assign(nv, 0);
  dist.assign(nv, 0);
  children.assign(nv, {});
  preorder.reserve(nv);
  std::vector<int> stack{r};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    preorder.push_back(v);
    for (auto [w, e] : t.neighbors(v)) {
      if (w == parent[v]) continue;
      parent[w] = v;
      parent_edge[w] = e;
      depth[w] = depth[v] + 1;
      dist[w] = dist[v] + t.edge(e).units;
      children[v].push_back(w);
      stack.push_back(w);
    }
  }
  for (auto& c : children) std::sort(c.begin(), c.end());
}

int RootedView::lca(int a, int b) const {
  while (depth[a] > depth[b]) a = parent[a];
  while (depth[b] > depth[a]) b = parent[b];
  while (a != b) {
    a = parent[a];
    b = parent[b];
  }
  return a;
}

int RootedView::graph_distance(int a, int b) const { return depth[a] + depth[b] - 2 * depth[lca(a, b)]; }

Units RootedView::distance(int a, int b) const { return dist[a] + dist[b] - 2 * dist[lca(a, b)]; }

bool RootedView::is_ancestor(int a, int b) const {
  while (depth[b] > depth[a]) b = parent[b];
  return a == b;
}

std::vector<int> RootedView::path_edges(int a, int b) const {
  int c = lca(a, b);
  std::vector<int> out;
  for (int v = a; v != c; v = parent[v]) out.push_back(parent_edge[v]);
  std::vector<int> tail;
  for (int v = b; v != c; v = parent[v]) tail.push_back(parent_edge[v]);
  out.insert(out.end(), tail.rbegin(), tail.rend());
  return out;
}

std::vector<int> RootedView::path_vertices(int a, int b) const {
  int c = lca(a, b);
  std::vector<int> out;
  for (int v = a; v != c; v = parent[v]) out.push_back(v);
  out.push_back(c);
  std::vector<int> tail;
  for (int v = b; v != c; v = parent[v]) tail.push_back(v);
  out.insert(out.end(), tail.rbegin(), tail.rend());
  return out;
}

namespace {

std::string canonical_impl(const Phylogeny& t, bool weights) {
  int start = t.leaf_vertex(0);
  if (t.num_leaves() == 1) return "0";
  RootedView view(t, start);
  std::vector<int> min_label(t.num_vertices(), 1 << 30);
  for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it) {
    int v = *it;
    if (t.is_leaf(v)) min_label[v] = t.label_of(v);
    for (int c : view.children[v]) min_label[v] = std::min(min_label[v], min_label[c]);
  }
  std::function<std::string(int)> rec = [&](int v) {
    std::string s;
    auto kids = view.children[v];
    std::sort(kids.begin(), kids.end(), [&](int a, int b) { return min_label[a] < min_label[b]; });
    if (kids.empty()) {
      s = std::to_string(t.label_of(v));
    } else {
      s = "(";
      for (size_t i = 0; i < kids.size(); ++i) {
        if (i) s += ",";
        s += rec(kids[i]);
      }
      s += ")";
    }
    if (weights && v != start) s += ":" + std::to_string(t.edge(view.parent_edge[v]).units);
    return s;
  };
  // A degree-2 designated root is topologically invisible; callers compare unrooted forms.
  return rec(start);
}

}  // namespace

std::string canonical_topology(const Phylogeny& t) { return canonical_impl(t.unrooted(), false); }
std::string canonical_form(const Phylogeny& t) { return canonical_impl(t.unrooted(), true); }

}  // namespace phylo
