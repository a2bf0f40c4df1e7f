#include "phylo/subtree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace phylo {

RootedTree::RootedTree(Phylogeny t) : RootedTree(t, t.effective_root()) {}

RootedTree::RootedTree(Phylogeny t, int root) : tree(std::move(t)), view(tree, root), metric(tree_metric(tree)) {}

TreeRef make_rooted(Phylogeny t) { return std::make_shared<const RootedTree>(std::move(t)); }
TreeRef make_rooted(Phylogeny t, int root) { return std::make_shared<const RootedTree>(std::move(t), root); }

namespace {

struct End {
  int vertex;
  Units to_point;
};

std::vector<End> ends(const Phylogeny& t, Point p) {
  if (p.is_vertex()) return {{p.vertex, 0}};
  const Edge& e = t.edge(p.edge);
  return {{e.u, p.offset}, {e.v, e.units - p.offset}};
}

}  // namespace

Point normalize(const Phylogeny& t, Point p) {
  if (p.is_vertex()) return Point::at(p.vertex);
  const Edge& e = t.edge(p.edge);
  if (p.offset <= 0) return Point::at(e.u);
  if (p.offset >= e.units) return Point::at(e.v);
  return p;
}

Units point_distance(const RootedTree& t, Point p, Point q) {
  p = normalize(t.tree, p);
  q = normalize(t.tree, q);
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) return std::abs(p.offset - q.offset);
  Units best = std::numeric_limits<Units>::max();
  for (auto x : ends(t.tree, p))
    for (auto y : ends(t.tree, q)) best = std::min(best, x.to_point + t.view.distance(x.vertex, y.vertex) + y.to_point);
  return best;
}

int point_graph_distance(const RootedTree& t, Point p, Point q) {
  p = normalize(t.tree, p);
  q = normalize(t.tree, q);
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) return 0;
  int best = std::numeric_limits<int>::max();
  for (auto x : ends(t.tree, p))
    for (auto y : ends(t.tree, q)) best = std::min(best, t.view.graph_distance(x.vertex, y.vertex));
  return best;
}

std::vector<int> point_path_edges(const RootedTree& t, Point p, Point q) {
  p = normalize(t.tree, p);
  q = normalize(t.tree, q);
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) return {p.edge};
  Units best = std::numeric_limits<Units>::max();
  int bx = -1, by = -1;
  for (auto x : ends(t.tree, p))
    for (auto y : ends(t.tree, q)) {
      Units d = x.to_point + t.view.distance(x.vertex, y.vertex) + y.to_point;
      if (d < best) {
        best = d;
        bx = x.vertex;
        by = y.vertex;
      }
    }
  std::vector<int> out = t.view.path_edges(bx, by);
  if (!p.is_vertex()) out.push_back(p.edge);
  if (!q.is_vertex()) out.push_back(q.edge);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Point locate_on_path(const RootedTree& t, int a, int b, Units from_a) {
  auto verts = t.view.path_vertices(a, b);
  Units acc = 0;
  for (size_t i = 0; i + 1 < verts.size(); ++i) {
    if (acc == from_a) return Point::at(verts[i]);
    int e = t.tree.edge_between(verts[i], verts[i + 1]);
    Units w = t.tree.edge(e).units;
    if (from_a < acc + w) {
      Units from_here = from_a - acc;
      Point p{-1, e, t.tree.edge(e).u == verts[i] ? from_here : w - from_here};
      return normalize(t.tree, p);
    }
    acc += w;
  }
  if (acc == from_a) return Point::at(verts.back());
  throw std::out_of_range("point beyond the end of the path");
}

int vertex_at_or_above(const RootedTree& t, Point p) {
  p = normalize(t.tree, p);
  if (p.is_vertex()) return p.vertex;
  const Edge& e = t.tree.edge(p.edge);
  return t.view.depth[e.u] < t.view.depth[e.v] ? e.u : e.v;
}

bool RestrictedSubtree::has_edge(int e) const { return std::binary_search(edges.begin(), edges.end(), e); }

std::vector<int> RestrictedSubtree::vertices() const {
  std::vector<int> out;
  for (int e : edges) {
    out.push_back(tree().edge(e).u);
    out.push_back(tree().edge(e).v);
  }
  if (edges.empty()) {
    if (root && root->is_vertex())
      out.push_back(root->vertex);
    else if (!labels.empty())
      out.push_back(tree().leaf_vertex(labels[0]));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RestrictedSubtree restrict_to(const TreeRef& t, std::vector<int> labels, const std::vector<int>& extra_vertices) {
  const Phylogeny& tree = t->tree;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<int> mark(tree.num_vertices(), 0);
  for (int a : labels) {
    if (a < 0 || a >= tree.num_leaves()) throw std::out_of_range("label not present in tree");
    mark[tree.leaf_vertex(a)] = 1;
  }
  for (int v : extra_vertices) mark[v] = 1;
  int total = 0;
  for (int m : mark) total += m;
  std::vector<int> below(mark);
  const RootedView& view = t->view;
  for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it)
    if (view.parent[*it] >= 0) below[view.parent[*it]] += below[*it];
  RestrictedSubtree y{t, {}, labels, std::nullopt};
  for (int v = 0; v < tree.num_vertices(); ++v)
    if (view.parent[v] >= 0 && below[v] > 0 && below[v] < total) y.edges.push_back(view.parent_edge[v]);
  std::sort(y.edges.begin(), y.edges.end());
  if (y.edges.empty() && labels.empty() && extra_vertices.size() == 1) y.root = Point::at(extra_vertices[0]);
  return y;
}

RestrictedSubtree with_root(RestrictedSubtree y, Point root) {
  y.root = normalize(y.tree(), root);
  return y;
}

Point top_of(const RestrictedSubtree& y) {
  auto verts = y.vertices();
  int best = verts.at(0);
  for (int v : verts)
    if (y.ref->view.depth[v] < y.ref->view.depth[best]) best = v;
  return Point::at(best);
}

bool is_metric_matching(const RestrictedSubtree& y, const RestrictedSubtree& y2) {
  if (y.labels != y2.labels) throw std::invalid_argument("matching requires equal leaf-label sets");
  const auto& m1 = y.ref->metric;
  const auto& m2 = y2.ref->metric;
  for (size_t i = 0; i < y.labels.size(); ++i)
    for (size_t j = i + 1; j < y.labels.size(); ++j)
      if (m1.units(y.labels[i], y.labels[j]) != m2.units(y.labels[i], y.labels[j])) return false;
  return true;
}

std::optional<Point> image_point(const RestrictedSubtree& y, const RestrictedSubtree& y2, Point p) {
  const RootedTree& t1 = *y.ref;
  const RootedTree& t2 = *y2.ref;
  std::vector<Units> d(y.labels.size());
  for (size_t i = 0; i < y.labels.size(); ++i) d[i] = point_distance(t1, Point::at(t1.tree.leaf_vertex(y.labels[i])), p);
  for (size_t i = 0; i < y.labels.size(); ++i) {
    if (d[i] == 0) return Point::at(t2.tree.leaf_vertex(y.labels[i]));
    for (size_t j = 0; j < y.labels.size(); ++j) {
      if (i == j) continue;
      if (d[i] + d[j] != t1.metric.units(y.labels[i], y.labels[j])) continue;
      return locate_on_path(t2, t2.tree.leaf_vertex(y.labels[i]), t2.tree.leaf_vertex(y.labels[j]), d[i]);
    }
  }
  return std::nullopt;
}

int RootedShape::num_leaves() const {
  int c = 0;
  for (const auto& n : nodes) c += n.label >= 0;
  return c;
}

std::vector<int> RootedShape::leaf_labels() const {
  std::vector<int> out;
  for (const auto& n : nodes)
    if (n.label >= 0) out.push_back(n.label);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<int> depths(const RootedShape& s) {
  std::vector<int> d(s.nodes.size(), 0);
  for (size_t i = 1; i < s.nodes.size(); ++i) d[i] = d[s.nodes[i].parent] + 1;
  return d;
}

}  // namespace

int RootedShape::height() const {
  auto d = depths(*this);
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

RootedShape shape_of(const RestrictedSubtree& y) {
  if (!y.root) throw std::invalid_argument("subtree has no root");
  const Phylogeny& t = y.tree();
  RootedShape s;
  s.upsilon = t.upsilon();
  Point r = normalize(t, *y.root);
  struct Item {
    int vertex;
    int from_edge;
    int node;
  };
  std::deque<Item> queue;
  if (r.is_vertex()) {
    s.nodes.push_back({-1, 0, t.label_of(r.vertex), {}});
    queue.push_back({r.vertex, -1, 0});
  } else {
    if (!y.has_edge(r.edge)) throw std::invalid_argument("root point is outside the subtree");
    const Edge& e = t.edge(r.edge);
    s.nodes.push_back({-1, 0, -1, {}});
    s.nodes.push_back({0, r.offset, t.label_of(e.u), {}});
    s.nodes.push_back({0, e.units - r.offset, t.label_of(e.v), {}});
    s.nodes[0].children = {1, 2};
    queue.push_back({e.u, r.edge, 1});
    queue.push_back({e.v, r.edge, 2});
  }
  while (!queue.empty()) {
    Item it = queue.front();
    queue.pop_front();
    for (auto [w, e] : t.neighbors(it.vertex)) {
      if (e == it.from_edge || !y.has_edge(e)) continue;
      int id = static_cast<int>(s.nodes.size());
      s.nodes.push_back({it.node, t.edge(e).units, t.label_of(w), {}});
      s.nodes[it.node].children.push_back(id);
      queue.push_back({w, e, id});
    }
  }
  return s;
}

RootedShape shape_of(const Phylogeny& t, int root) {
  std::vector<int> labels(t.num_leaves());
  for (int a = 0; a < t.num_leaves(); ++a) labels[a] = a;
  return shape_of(with_root(restrict_to(make_rooted(t, root), labels), Point::at(root)));
}

RootedShape suppress_unary(const RootedShape& s) {
  RootedShape out;
  out.upsilon = s.upsilon;
  out.nodes.push_back({-1, 0, s.nodes[0].label, {}});
  struct Item {
    int src;
    int dst;
  };
  std::deque<Item> queue{{0, 0}};
  while (!queue.empty()) {
    auto [src, dst] = queue.front();
    queue.pop_front();
    for (int c : s.nodes[src].children) {
      Units len = s.nodes[c].units;
      while (s.nodes[c].children.size() == 1 && s.nodes[c].label < 0) {
        c = s.nodes[c].children[0];
        len += s.nodes[c].units;
      }
      int id = static_cast<int>(out.nodes.size());
      out.nodes.push_back({dst, len, s.nodes[c].label, {}});
      out.nodes[dst].children.push_back(id);
      queue.push_back({c, id});
    }
  }
  return out;
}

namespace {

int completion_height(int height, int ell) { return (height / ell + 1) * ell; }

}  // namespace

RootedShape ell_completion(const RootedShape& s, int ell) {
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  auto d = depths(s);
  int target = completion_height(s.height(), ell);
  double size = static_cast<double>(s.nodes.size());
  for (size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].children.empty()) size += std::ldexp(2.0, target - d[i]);
  if (size > 4e6) throw std::length_error("l-completion too large to materialize");
  RootedShape out = s;
  std::vector<int> depth = d;
  for (size_t i = 0; i < s.nodes.size(); ++i) {
    if (!s.nodes[i].children.empty()) continue;
    std::vector<int> frontier{static_cast<int>(i)};
    for (int level = d[i]; level < target; ++level) {
      std::vector<int> next;
      for (int p : frontier)
        for (int k = 0; k < 2; ++k) {
          int id = static_cast<int>(out.nodes.size());
          out.nodes.push_back({p, 0, -1, {}});
          out.nodes[p].children.push_back(id);
          depth.push_back(level + 1);
          next.push_back(id);
        }
      frontier = std::move(next);
    }
  }
  return out;
}

std::vector<double> level_populations(const RootedShape& s, int ell) {
  auto d = depths(s);
  int target = completion_height(s.height(), ell);
  std::vector<double> pop;
  for (int level = 0; level < target; level += ell) {
    double count = 0;
    for (size_t i = 0; i < s.nodes.size(); ++i) {
      if (d[i] == level)
        count += 1;
      else if (d[i] < level && s.nodes[i].children.empty())
        count += std::ldexp(1.0, level - d[i]);
    }
    pop.push_back(count);
  }
  return pop;
}

bool is_dense(const RootedShape& s, int ell, int wp) {
  auto pop = level_populations(s, ell);
  double base = std::ldexp(1.0, ell) - wp;
  for (size_t i = 0; i < pop.size(); ++i)
    if (pop[i] < std::pow(base, static_cast<double>(i))) return false;
  return true;
}

bool is_dense(const RestrictedSubtree& y, int ell, int wp) { return is_dense(shape_of(y), ell, wp); }

std::vector<int> edge_intersection(const RestrictedSubtree& y, const RestrictedSubtree& z) {
  std::vector<int> out;
  std::set_intersection(y.edges.begin(), y.edges.end(), z.edges.begin(), z.edges.end(), std::back_inserter(out));
  return out;
}

bool is_cohanging(const RestrictedSubtree& y, const RestrictedSubtree& z) {
  if (!y.root || !z.root) throw std::invalid_argument("co-hanging requires rooted subtrees");
  if (!edge_intersection(y, z).empty()) throw SubtreeIntersection("subtrees share an edge");
  auto path = point_path_edges(*y.ref, *y.root, *z.root);
  for (int e : path)
    if (y.has_edge(e) || z.has_edge(e)) return false;
  // Edgeless subtrees still occupy their vertex.
  if (y.edges.empty() && z.edges.empty() && *y.root == *z.root) return false;
  return true;
}

std::vector<int> linkage(const RestrictedSubtree& y, const RestrictedSubtree& z) {
  std::vector<int> out = y.edges;
  out.insert(out.end(), z.edges.begin(), z.edges.end());
  auto path = point_path_edges(*y.ref, *y.root, *z.root);
  out.insert(out.end(), path.begin(), path.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> topping(const RestrictedSubtree& y, int gamma) {
  std::vector<int> out = y.edges;
  const RootedView& view = y.ref->view;
  int v = vertex_at_or_above(*y.ref, *y.root);
  for (int i = 0; i < gamma && view.parent[v] >= 0; ++i) {
    out.push_back(view.parent_edge[v]);
    v = view.parent[v];
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace phylo
