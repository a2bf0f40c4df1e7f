#include "phylo/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace phylo {

char color_letter(Color c) {
  switch (c) {
    case Color::green: return 'G';
    case Color::red: return 'R';
    case Color::yellow: return 'Y';
    case Color::black: return 'B';
    default: return '.';
  }
}

int Coloring::count(Color c) const { return static_cast<int>(std::count(color.begin(), color.end(), c)); }

std::vector<int> Coloring::vertices(Color c) const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(color.size()); ++v)
    if (color[v] == c) out.push_back(v);
  return out;
}

std::vector<int> Coloring::green_children(int x) const {
  std::vector<int> out;
  for (int c : ell_children[x])
    if (color[c] == Color::green) out.push_back(c);
  return out;
}

std::vector<int> Coloring::maximal_cluster_roots() const {
  std::vector<int> out;
  for (int v : t0->view.preorder)
    if (color[v] == Color::green && (ell_parent[v] < 0 || color[ell_parent[v]] != Color::green)) out.push_back(v);
  return out;
}

Coloring color_vertices(const Phylogeny& t0, const Phylogeny& t_sharp, int ell) {
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  if (t0.num_leaves() != t_sharp.num_leaves()) throw std::invalid_argument("trees must share the leaf set");
  int root = t0.effective_root();
  if (t0.is_leaf(root) && t0.num_leaves() > 1) throw std::invalid_argument("reference root must be internal");
  Coloring c;
  c.t0 = make_rooted(t0.with_root(root), root);
  c.t_sharp = make_rooted(t_sharp);
  c.ell = ell;
  const Phylogeny& t = c.t0->tree;
  const RootedView& view = c.t0->view;
  int nv = t.num_vertices();
  c.color.assign(nv, Color::none);
  c.level.assign(nv, -1);
  c.ell_parent.assign(nv, -1);
  c.ell_children.assign(nv, {});
  c.cluster_labels.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    int d = view.depth[v];
    if (t.is_leaf(v))
      c.level[v] = (d + ell - 1) / ell;
    else if (d % ell == 0)
      c.level[v] = d / ell;
  }
  for (int v : view.preorder) {
    if (c.level[v] < 0 || v == root) continue;
    int target = (c.level[v] - 1) * ell;
    int a = view.parent[v];
    while (view.depth[a] > target) a = view.parent[a];
    c.ell_parent[v] = a;
    c.ell_children[a].push_back(v);
  }
  const TreeMetric& m0 = c.t0->metric;
  const TreeMetric& m1 = c.t_sharp->metric;
  for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it) {
    int x = *it;
    if (c.level[x] < 0) continue;
    if (t.is_leaf(x)) {
      c.color[x] = Color::green;
      c.cluster_labels[x] = {t.label_of(x)};
      continue;
    }
    std::vector<int> green;
    int non_green = 0;
    for (int ch : c.ell_children[x]) {
      if (c.color[ch] == Color::green)
        green.push_back(ch);
      else
        ++non_green;
    }
    if (non_green >= 2) {
      c.color[x] = Color::yellow;
      continue;
    }
    // Children are matching on their own, so only cross pairs can disagree.
    bool matching = true;
    for (size_t i = 0; i < green.size() && matching; ++i)
      for (size_t j = i + 1; j < green.size() && matching; ++j)
        for (int a : c.cluster_labels[green[i]])
          for (int b : c.cluster_labels[green[j]])
            if (m0.units(a, b) != m1.units(a, b)) {
              matching = false;
              break;
            }
    auto& labels = c.cluster_labels[x];
    for (int ch : green) labels.insert(labels.end(), c.cluster_labels[ch].begin(), c.cluster_labels[ch].end());
    std::sort(labels.begin(), labels.end());
    c.color[x] = matching ? Color::green : Color::red;
  }
  return c;
}

RestrictedSubtree g_cluster(const Coloring& c, int x) {
  if (c.color.at(x) != Color::green) throw std::invalid_argument("g_cluster requires a G-vertex");
  return with_root(restrict_to(c.t0, c.cluster_labels[x], {x}), Point::at(x));
}

RestrictedSubtree matching_subtree(const Coloring& c, int x) {
  auto y0 = g_cluster(c, x);
  auto y1 = restrict_to(c.t_sharp, c.cluster_labels[x]);
  auto img = image_point(y0, y1, Point::at(x));
  if (!img) img = image_point(y0, y1, top_of(restrict_to(c.t0, c.cluster_labels[x])));
  if (!img) throw std::logic_error("cluster has no image");
  return with_root(y1, *img);
}

Overlap compute_overlap(const Coloring& c) {
  Overlap o;
  const Phylogeny& t0 = c.t0->tree;
  const Phylogeny& t1 = c.t_sharp->tree;
  o.multiplicity.assign(t1.num_edges(), 0);
  o.cluster_of_edge.assign(t0.num_edges(), -1);
  o.image_path.assign(t0.num_edges(), {});
  o.cluster_roots = c.maximal_cluster_roots();
  for (int x : o.cluster_roots) {
    o.clusters0.push_back(g_cluster(c, x));
    o.clusters_sharp.push_back(matching_subtree(c, x));
    for (int e : o.clusters_sharp.back().edges) ++o.multiplicity[e];
  }
  for (int e = 0; e < t1.num_edges(); ++e)
    if (o.multiplicity[e] >= 2) o.sharp_edges.push_back(e);
  for (size_t i = 0; i < o.cluster_roots.size(); ++i) {
    const auto& g0 = o.clusters0[i];
    const auto& g1 = o.clusters_sharp[i];
    for (int e : g0.edges) {
      o.cluster_of_edge[e] = static_cast<int>(i);
      auto pu = image_point(g0, g1, Point::at(t0.edge(e).u));
      auto pv = image_point(g0, g1, Point::at(t0.edge(e).v));
      if (!pu || !pv) continue;
      o.image_path[e] = point_path_edges(*c.t_sharp, *pu, *pv);
      for (int f : o.image_path[e])
        if (o.multiplicity[f] >= 2) {
          o.t0_edges.push_back(e);
          break;
        }
    }
  }
  std::sort(o.t0_edges.begin(), o.t0_edges.end());
  return o;
}

std::vector<int> consistent_parents(const Overlap& o, int cluster) {
  const auto& g0 = o.clusters0.at(cluster);
  const auto& g1 = o.clusters_sharp.at(cluster);
  const Phylogeny& t = g0.tree();
  std::vector<int> parent(t.num_vertices(), -2);
  auto top = image_point(g1, g0, top_of(g1));
  if (!top) throw std::logic_error("candidate-tree top has no preimage");
  std::deque<int> queue;
  if (top->is_vertex()) {
    parent[top->vertex] = -1;
    queue.push_back(top->vertex);
  } else {
    for (int v : {t.edge(top->edge).u, t.edge(top->edge).v}) {
      parent[v] = -1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, e] : t.neighbors(v))
      if (g0.has_edge(e) && parent[w] == -2) {
        parent[w] = v;
        queue.push_back(w);
      }
  }
  return parent;
}

namespace {

std::vector<char> overlap_vertices(const Overlap& o, int cluster, const Phylogeny& t) {
  std::vector<char> in(t.num_vertices(), 0);
  for (int e : o.t0_edges)
    if (o.cluster_of_edge[e] == cluster) in[t.edge(e).u] = in[t.edge(e).v] = 1;
  return in;
}

// Sums for every cluster vertex at once.
std::vector<double> depth_sums(const Overlap& o, int cluster) {
  const Phylogeny& t = o.clusters0.at(cluster).tree();
  auto parent = consistent_parents(o, cluster);
  auto in = overlap_vertices(o, cluster, t);
  std::vector<double> sum(t.num_vertices(), 0.0);
  for (int v = 0; v < t.num_vertices(); ++v) {
    if (!in[v] || parent[v] == -2) continue;
    int hops = 0;
    for (int a = v; a >= 0; a = parent[a], ++hops) sum[a] += std::pow(2.0, -hops / 2.0);
  }
  return sum;
}

}  // namespace

double overlap_depth_sum(const Overlap& o, int cluster, int x) { return depth_sums(o, cluster).at(x); }

double shallow_threshold(double beta) { return beta / (1 - 1 / std::sqrt(2.0)); }

std::vector<int> shallow_vertices(const Overlap& o, int cluster, double beta) {
  auto parent = consistent_parents(o, cluster);
  auto sum = depth_sums(o, cluster);
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(sum.size()); ++v)
    if (parent[v] != -2 && sum[v] < shallow_threshold(beta)) out.push_back(v);
  return out;
}

std::vector<UsefulEdge> useful_edges(const Overlap& o, double beta) {
  if (o.t0_edges.empty()) return {};
  const Phylogeny& t = o.clusters0.front().tree();
  std::vector<char> shallow(t.num_vertices(), 0);
  for (int i = 0; i < static_cast<int>(o.cluster_roots.size()); ++i)
    for (int v : shallow_vertices(o, i, beta)) shallow[v] = 1;
  std::vector<int> shallow_edges;
  for (int e : o.t0_edges)
    if (shallow[t.edge(e).u] && shallow[t.edge(e).v]) shallow_edges.push_back(e);
  std::map<int, std::vector<int>> by_sharp;
  for (int e : shallow_edges)
    for (int f : o.image_path[e]) by_sharp[f].push_back(e);
  std::vector<UsefulEdge> out;
  for (int e : shallow_edges) {
    bool found = false;
    for (int f : o.image_path[e]) {
      for (int e2 : by_sharp[f])
        if (o.cluster_of_edge[e2] != o.cluster_of_edge[e]) {
          out.push_back({e, e2, f});
          found = true;
          break;
        }
      if (found) break;
    }
  }
  return out;
}

Coloring recolor_black(const Coloring& c, const Overlap& o) {
  Coloring out = c;
  std::vector<char> touches(c.color.size(), 0);
  for (size_t i = 0; i < o.cluster_roots.size(); ++i)
    for (int e : o.clusters_sharp[i].edges)
      if (o.multiplicity[e] >= 2) touches[o.cluster_roots[i]] = 1;
  for (int x : c.vertices(Color::red))
    for (int ch : c.green_children(x))
      if (touches[ch]) out.color[x] = Color::black;
  return out;
}

VertexMap cluster_vertex_map(const Coloring& c) {
  const Phylogeny& t0 = c.t0->tree;
  const Phylogeny& t1 = c.t_sharp->tree;
  std::vector<char> used0(t0.num_vertices(), 0), used1(t1.num_vertices(), 0);
  VertexMap map;
  for (int x : c.maximal_cluster_roots()) {
    auto g0 = g_cluster(c, x);
    auto g1 = restrict_to(c.t_sharp, c.cluster_labels[x]);
    for (int v : g0.vertices()) {
      if (t0.is_leaf(v) || used0[v]) continue;
      int span_degree = 0;
      for (auto [w, e] : t0.neighbors(v)) span_degree += g0.has_edge(e);
      if (span_degree != 3) continue;
      auto img = image_point(g0, g1, Point::at(v));
      if (!img || !img->is_vertex() || t1.is_leaf(img->vertex) || used1[img->vertex]) continue;
      used0[v] = used1[img->vertex] = 1;
      map.push_back({v, img->vertex});
    }
  }
  return map;
}

namespace {

// Vertex renumbering performed by Phylogeny::unrooted.
int after_unrooting(const Phylogeny& t, int v) {
  auto r = t.root();
  if (!r || t.degree(*r) != 2 || t.is_leaf(*r)) return v;
  return v > *r ? v - 1 : v;
}

}  // namespace

int blowup_upper_bound(const Phylogeny& t0, const Phylogeny& t_sharp, int ell) {
  auto c = color_vertices(t0, t_sharp, ell);
  auto map = cluster_vertex_map(c);
  const Phylogeny& a = c.t0->tree;
  const Phylogeny& b = c.t_sharp->tree;
  VertexMap shifted;
  for (auto [u, v] : map) shifted.push_back({after_unrooting(a, u), after_unrooting(b, v)});
  return blowup_bound_from_map(a.unrooted(), b.unrooted(), shifted);
}

}  // namespace phylo
