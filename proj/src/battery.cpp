#include "phylo/battery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "phylo/swap.hpp"

namespace phylo {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::homogeneous: return "homogeneous";
    case Regime::many_red: return "many-red";
    case Regime::large_overlap: return "large-overlap";
  }
  return "?";
}

const char* proximity_name(Proximity p) {
  switch (p) {
    case Proximity::proximal: return "proximal";
    case Proximity::semi_proximal: return "semi-proximal";
    case Proximity::non_proximal: return "non-proximal";
  }
  return "?";
}

const char* origin_name(PanelOrigin o) {
  switch (o) {
    case PanelOrigin::homogeneous: return "homogeneous";
    case PanelOrigin::cohanging: return "co-hanging";
    case PanelOrigin::far: return "far";
    case PanelOrigin::close: return "close";
    case PanelOrigin::overlap: return "overlap";
  }
  return "?";
}

int default_ell(double g, int wp) {
  const double g_star = std::log(std::sqrt(2.0));
  if (!(g < g_star)) throw std::domain_error("no finite l: g is not below ln sqrt 2");
  double g_mid = (g_star + g) / 2;
  for (int ell = 2; ell <= 30; ++ell) {
    double size = std::ldexp(1.0, ell);
    if (size <= wp) continue;
    if (size / ((size - wp) * (size - wp)) <= std::exp(-2 * ell * g_mid)) return ell;
  }
  throw std::domain_error("no l <= 30 satisfies the accuracy inequality");
}

BatteryParams default_params(Regime r, int ell, Units g_units) {
  BatteryParams p;
  p.ell = ell;
  p.g_units = g_units;
  double gu = static_cast<double>(g_units);
  switch (r) {
    case Regime::homogeneous:
      p.wp = 1;
      p.gamma = 2.0 * ell;
      break;
    case Regime::many_red:
      p.wp = 1;
      p.gamma = (6 + 2 * gu) * ell;
      break;
    case Regime::large_overlap:
      p.wp = 5;
      p.gamma = 6 * gu * std::log2(8 / (1 - 1 / std::sqrt(2.0))) + 2 * ell * gu + 4;
      p.beta = 12 * gu / (12 * gu - 1);
      break;
  }
  p.gamma_t = static_cast<int>(std::ceil(p.gamma / ell - 1e-12)) * ell;
  return p;
}

Proximity classify(int graph_distance, const BatteryParams& p) {
  if (graph_distance <= p.gamma) return Proximity::proximal;
  if (graph_distance <= p.gamma_t) return Proximity::semi_proximal;
  return Proximity::non_proximal;
}

namespace {

int min_label(const Coloring& c, int v) { return c.cluster_labels[v].empty() ? -1 : c.cluster_labels[v].front(); }

void sort_by_label(const Coloring& c, std::vector<int>& vs) {
  std::sort(vs.begin(), vs.end(), [&](int a, int b) { return min_label(c, a) < min_label(c, b); });
}

bool cohanging_safe(const RestrictedSubtree& a, const RestrictedSubtree& b) {
  try {
    return is_cohanging(a, b);
  } catch (const SubtreeIntersection&) {
    return false;
  }
}

void fill_facts(TestPanel& t, const BatteryParams& p) {
  const RootedTree& r0 = *t.y0.ref;
  const RootedTree& r1 = *t.y_sharp.ref;
  t.d0 = point_distance(r0, *t.y0.root, *t.z0.root);
  t.d_sharp = point_distance(r1, *t.y_sharp.root, *t.z_sharp.root);
  t.graph0 = point_graph_distance(r0, *t.y0.root, *t.z0.root);
  t.graph_sharp = point_graph_distance(r1, *t.y_sharp.root, *t.z_sharp.root);
  t.prox0 = classify(t.graph0, p);
  t.prox_sharp = classify(t.graph_sharp, p);
  t.alpha = t.d0 < t.d_sharp ? 1 : -1;
}

bool root_corresponds(const RestrictedSubtree& a, const RestrictedSubtree& b) {
  auto img = image_point(a, b, *a.root);
  return img && normalize(b.tree(), *img) == normalize(b.tree(), *b.root);
}

// First violated cluster or pair requirement, or empty.
std::string requirement_failure(const TestPanel& t, const BatteryParams& p) {
  for (const auto* s : {&t.y0, &t.z0, &t.y_sharp, &t.z_sharp}) {
    if (!s->root) return "dense: unrooted test subtree";
    if (!is_dense(*s, p.ell, p.wp)) return "dense";
  }
  if (t.y0.labels != t.y_sharp.labels || t.z0.labels != t.z_sharp.labels) return "matching: leaf sets differ";
  if (!is_metric_matching(t.y0, t.y_sharp) || !is_metric_matching(t.z0, t.z_sharp)) return "matching: metrics differ";
  if (!root_corresponds(t.y0, t.y_sharp) || !root_corresponds(t.z0, t.z_sharp)) return "matching: roots do not correspond";
  if (!cohanging_safe(t.y0, t.z0)) return "co-hanging: reference tree";
  if (!cohanging_safe(t.y_sharp, t.z_sharp)) return "co-hanging: candidate tree";
  TestPanel fresh = t;
  fill_facts(fresh, p);
  if (std::abs(fresh.d0 - fresh.d_sharp) < 1) return "evolutionary-distance: gap below 1/upsilon";
  if (fresh.prox0 != Proximity::proximal && fresh.prox_sharp != Proximity::proximal)
    return "evolutionary-distance: neither pair proximal";
  if (fresh.d0 != t.d0 || fresh.d_sharp != t.d_sharp || fresh.prox0 != t.prox0 || fresh.prox_sharp != t.prox_sharp)
    return "proximity: recorded distances are stale";
  if (fresh.alpha != t.alpha) return "alpha";
  return {};
}

}  // namespace

std::optional<TestPanel> make_panel(const Coloring& c, int y, int z, const BatteryParams& p, PanelOrigin origin,
                                    int anchor, std::string* why) {
  auto fail = [&](std::string s) -> std::optional<TestPanel> {
    if (why) *why = std::move(s);
    return std::nullopt;
  };
  if (y == z) return fail("test vertices coincide");
  if (c.color.at(y) != Color::green || c.color.at(z) != Color::green) return fail("test vertex is not G");
  TestPanel t;
  t.y0 = g_cluster(c, y);
  t.z0 = g_cluster(c, z);
  t.y_sharp = matching_subtree(c, y);
  t.z_sharp = matching_subtree(c, z);
  t.y_vertex = y;
  t.z_vertex = z;
  t.origin = origin;
  t.anchor = anchor;
  fill_facts(t, p);
  auto failure = requirement_failure(t, p);
  if (!failure.empty()) return fail(failure);
  return t;
}

namespace {

// First valid panel over candidate pairs in the given order.
std::optional<TestPanel> first_valid(const Coloring& c, const std::vector<int>& ys, const std::vector<int>& zs,
                                     const BatteryParams& p, PanelOrigin origin, int anchor, std::string& why) {
  for (int y : ys)
    for (int z : zs) {
      if (y == z) continue;
      std::string w;
      if (auto t = make_panel(c, y, z, p, origin, anchor, &w)) return t;
      if (why.empty()) why = w;
    }
  if (why.empty()) why = "no candidate pair";
  return std::nullopt;
}

}  // namespace

PanelSet build_panels_homogeneous(const Coloring& c, const BatteryParams& p) {
  PanelSet out;
  for (int x : c.t0->view.preorder) {
    if (c.color[x] != Color::red) continue;
    auto kids = c.green_children(x);
    sort_by_label(c, kids);
    std::optional<TestPanel> found;
    std::string why;
    for (size_t i = 0; i < kids.size() && !found; ++i)
      for (size_t j = i + 1; j < kids.size() && !found; ++j) {
        std::string w;
        found = make_panel(c, kids[i], kids[j], p, PanelOrigin::homogeneous, x, &w);
        if (!found && why.empty()) why = w;
      }
    if (found)
      out.panels.push_back(std::move(*found));
    else
      out.failures.push_back({x, why.empty() ? "fewer than two G-children" : why});
  }
  return out;
}

namespace {

// G l-vertices strictly below `from` (or equal to it) inside the cluster of `top`, within `radius` hops,
// nearest first.
std::vector<int> green_below(const Coloring& c, int top, int from, int radius) {
  const RootedView& view = c.t0->view;
  const auto& top_labels = c.cluster_labels[top];
  std::vector<std::pair<int, int>> found;
  for (int v = 0; v < static_cast<int>(c.color.size()); ++v) {
    if (c.color[v] != Color::green || !view.is_ancestor(from, v)) continue;
    int hops = view.depth[v] - view.depth[from];
    if (hops > radius) continue;
    if (!std::binary_search(top_labels.begin(), top_labels.end(), min_label(c, v))) continue;
    found.push_back({hops, v});
  }
  std::sort(found.begin(), found.end(), [&](auto a, auto b) {
    return a.first != b.first ? a.first < b.first : min_label(c, a.second) < min_label(c, b.second);
  });
  std::vector<int> out;
  for (auto [h, v] : found) out.push_back(v);
  return out;
}

// Reference-tree vertex at or below a point on an edge.
int lower_vertex(const RootedTree& t, Point p) {
  p = normalize(t.tree, p);
  if (p.is_vertex()) return p.vertex;
  const Edge& e = t.tree.edge(p.edge);
  return t.view.depth[e.u] > t.view.depth[e.v] ? e.u : e.v;
}

// Vertex where the candidate-tree path from a's root to b's root stops running inside a.
std::optional<int> exit_vertex(const RestrictedSubtree& a, const RestrictedSubtree& b) {
  if (!a.root->is_vertex() || !b.root->is_vertex()) return std::nullopt;
  auto path = a.ref->view.path_vertices(a.root->vertex, b.root->vertex);
  size_t i = 0;
  while (i + 1 < path.size() && a.has_edge(a.tree().edge_between(path[i], path[i + 1]))) ++i;
  return path[i];
}

struct NonCohanging {
  int y, z;
};

std::vector<int> far_candidates(const Coloring& c, int top, const RestrictedSubtree& top_sharp, int exit_sharp) {
  if (c.t0->tree.is_leaf(top) || exit_sharp == top_sharp.root->vertex) return {top};
  auto v0 = image_point(top_sharp, g_cluster(c, top), Point::at(exit_sharp));
  if (!v0) return {};
  int low = lower_vertex(*c.t0, *v0);
  const RootedView& view = c.t0->view;
  if (low == top) return {top};
  int side = low;
  while (view.parent[side] != top) side = view.parent[side];
  std::vector<int> out;
  for (int k : c.green_children(top))
    if (!view.is_ancestor(side, k)) out.push_back(k);
  sort_by_label(c, out);
  return out;
}

std::vector<int> close_candidates(const Coloring& c, int top, const RestrictedSubtree& top_sharp, int exit_sharp) {
  auto v0 = image_point(top_sharp, g_cluster(c, top), Point::at(exit_sharp));
  if (!v0) return {};
  return green_below(c, top, lower_vertex(*c.t0, *v0), 2 * c.ell);
}

}  // namespace

PanelSet build_panels_many_r(const Coloring& c, const BatteryParams& p) {
  PanelSet out;
  for (int x : c.t0->view.preorder) {
    if (c.color[x] != Color::red) continue;
    auto kids = c.green_children(x);
    sort_by_label(c, kids);
    std::map<int, RestrictedSubtree> sharp;
    for (int k : kids) sharp.emplace(k, matching_subtree(c, k));
    std::optional<NonCohanging> bad;
    for (size_t i = 0; i < kids.size() && !bad; ++i)
      for (size_t j = i + 1; j < kids.size() && !bad; ++j)
        if (!cohanging_safe(sharp.at(kids[i]), sharp.at(kids[j]))) bad = NonCohanging{kids[i], kids[j]};
    std::optional<TestPanel> found;
    std::string why;
    if (!bad) {
      // Co-hanging case: a pair at a different distance, moved down one l-level when needed.
      for (size_t i = 0; i < kids.size() && !found; ++i)
        for (size_t j = i + 1; j < kids.size() && !found; ++j) {
          int a = kids[i], b = kids[j];
          if (c.t0->view.distance(a, b) == point_distance(*c.t_sharp, *sharp.at(a).root, *sharp.at(b).root)) continue;
          auto ys = std::vector<int>{a}, zs = std::vector<int>{b};
          auto ya = c.green_children(a), zb = c.green_children(b);
          sort_by_label(c, ya);
          sort_by_label(c, zb);
          ys.insert(ys.end(), ya.begin(), ya.end());
          zs.insert(zs.end(), zb.begin(), zb.end());
          std::string w;
          found = first_valid(c, ys, zs, p, PanelOrigin::cohanging, x, w);
          if (!found && why.empty()) why = w;
        }
    } else {
      int a = bad->y, b = bad->z;
      const auto& ya = sharp.at(a);
      const auto& zb = sharp.at(b);
      auto v_sharp = exit_vertex(ya, zb);
      auto w_sharp = exit_vertex(zb, ya);
      if (!v_sharp || !w_sharp) {
        out.failures.push_back({x, "non-co-hanging pair rooted inside an edge"});
        continue;
      }
      Units d0 = c.t0->view.distance(a, b);
      Units d1 = point_distance(*c.t_sharp, *ya.root, *zb.root);
      bool far = d1 > 2 * p.g_units * c.ell;
      PanelOrigin origin = far ? PanelOrigin::far : PanelOrigin::close;
      std::vector<int> ys, zs;
      if (far || d0 != d1) {
        ys = far_candidates(c, a, ya, *v_sharp);
        zs = far_candidates(c, b, zb, *w_sharp);
      } else {
        ys = close_candidates(c, a, ya, *v_sharp);
        zs = close_candidates(c, b, zb, *w_sharp);
      }
      found = first_valid(c, ys, zs, p, origin, x, why);
    }
    if (found)
      out.panels.push_back(std::move(*found));
    else
      out.failures.push_back({x, why.empty() ? "fewer than two G-children" : why});
  }
  return out;
}

namespace {

// Nearest witness below `start` (inclusive) in the consistent rooting: a cluster leaf or a vertex
// outside the overlap.
std::optional<int> nearest_witness(const Phylogeny& t, const std::vector<int>& parent, const std::vector<char>& in_overlap,
                                   int start, int max_hops) {
  std::deque<std::pair<int, int>> queue{{start, 0}};
  while (!queue.empty()) {
    auto [v, h] = queue.front();
    queue.pop_front();
    if (t.is_leaf(v) || !in_overlap[v]) return v;
    if (h == max_hops) continue;
    std::vector<int> kids;
    for (auto [w, e] : t.neighbors(v))
      if (parent[w] == v) kids.push_back(w);
    std::sort(kids.begin(), kids.end());
    for (int w : kids) queue.push_back({w, h + 1});
  }
  return std::nullopt;
}

struct Side {
  std::optional<Point> image;
  int witness;
};

}  // namespace

OverlapPanelSet build_panels_large_overlap(const Coloring& c, const Overlap& o, const BatteryParams& p) {
  OverlapPanelSet out;
  const Phylogeny& t0 = c.t0->tree;
  const RootedTree& r1 = *c.t_sharp;
  int max_hops = static_cast<int>(std::floor(3 * std::log2(4 * p.beta / (1 - 1 / std::sqrt(2.0)))));
  std::set<std::pair<int, int>> seen;
  for (const auto& useful : useful_edges(o, p.beta)) {
    std::array<int, 2> edges{useful.edge, useful.partner};
    std::array<std::array<int, 2>, 2> wit{};
    bool ok = true;
    std::string why;
    for (int s = 0; s < 2 && ok; ++s) {
      int cl = o.cluster_of_edge[edges[s]];
      auto parent = consistent_parents(o, cl);
      std::vector<char> in(t0.num_vertices(), 0);
      for (int e : o.t0_edges)
        if (o.cluster_of_edge[e] == cl) in[t0.edge(e).u] = in[t0.edge(e).v] = 1;
      const Edge& e = t0.edge(edges[s]);
      int upper = parent[e.v] == e.u ? e.u : e.v;
      int lower = upper == e.u ? e.v : e.u;
      int other = -1;
      for (auto [w, f] : t0.neighbors(upper))
        if (parent[w] == upper && w != lower) other = w;
      auto a = nearest_witness(t0, parent, in, lower, max_hops);
      auto b = other >= 0 ? nearest_witness(t0, parent, in, other, max_hops) : std::nullopt;
      if (!a || !b) {
        ok = false;
        why = "no witness within distance bound";
        break;
      }
      // Sort the pair by side of the shared candidate-tree edge.
      const Edge& f = r1.tree.edge(useful.shared);
      auto side_u = [&](int w) {
        auto img = image_point(o.clusters0[cl], o.clusters_sharp[cl], Point::at(w));
        return point_distance(r1, *img, Point::at(f.u)) < point_distance(r1, *img, Point::at(f.v));
      };
      bool au = side_u(*a), bu = side_u(*b);
      if (au == bu) {
        ok = false;
        why = "witnesses on one side of the shared edge";
        break;
      }
      wit[s] = au ? std::array<int, 2>{*a, *b} : std::array<int, 2>{*b, *a};
    }
    if (!ok) {
      out.failures.push_back({useful.edge, why});
      continue;
    }
    // Quartet order (y_i, z_i, y_j, z_j): y on the u-side of the shared edge.
    std::array<int, 4> q{wit[0][0], wit[0][1], wit[1][0], wit[1][1]};
    std::array<int, 4> owner{o.cluster_of_edge[edges[0]], o.cluster_of_edge[edges[0]], o.cluster_of_edge[edges[1]],
                             o.cluster_of_edge[edges[1]]};
    std::array<Point, 4> img;
    for (int k = 0; k < 4; ++k)
      img[k] = *image_point(o.clusters0[owner[k]], o.clusters_sharp[owner[k]], Point::at(q[k]));
    std::array<std::array<Units, 4>, 4> d0{}, d1{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        d0[a][b] = c.t0->view.distance(q[a], q[b]);
        d1[a][b] = point_distance(r1, img[a], img[b]);
      }
    QuartetWitnesses qw{useful.edge, q, quartet_split(d0), quartet_split(d1)};
    out.quartets.push_back(qw);
    // One of the cross pairs is longer in the reference tree.
    int first = -1;
    if (d0[0][2] > d1[0][2])
      first = 0;
    else if (d0[1][3] > d1[1][3])
      first = 1;
    if (first < 0) {
      out.failures.push_back({useful.edge, "no cross pair is longer in the reference tree"});
      continue;
    }
    auto near_green = [&](int w, int cl) {
      int top = o.cluster_roots[cl];
      const RootedView& view = c.t0->view;
      std::vector<std::pair<int, int>> found;
      for (int v = 0; v < t0.num_vertices(); ++v) {
        if (c.color[v] != Color::green || !view.is_ancestor(top, v)) continue;
        const auto& tl = c.cluster_labels[top];
        if (!std::binary_search(tl.begin(), tl.end(), min_label(c, v))) continue;
        found.push_back({view.graph_distance(w, v), v});
      }
      std::sort(found.begin(), found.end());
      std::vector<int> vs;
      for (auto [h, v] : found) vs.push_back(v);
      return vs;
    };
    auto ys = near_green(q[first], owner[first]);
    auto zs = near_green(q[first + 2], owner[first + 2]);
    std::optional<TestPanel> found;
    std::string fail;
    for (int y : ys) {
      for (int z : zs) {
        if (seen.count({std::min(y, z), std::max(y, z)})) continue;
        std::string w;
        auto t = make_panel(c, y, z, p, PanelOrigin::overlap, useful.edge, &w);
        if (t && (t->d0 <= t->d_sharp || t->prox_sharp != Proximity::proximal)) {
          t.reset();
          w = "test pair not shorter and proximal in the candidate tree";
        }
        if (t) {
          found = std::move(t);
          break;
        }
        if (fail.empty()) fail = w;
      }
      if (found) break;
    }
    if (found) {
      seen.insert({std::min(found->y_vertex, found->z_vertex), std::max(found->y_vertex, found->z_vertex)});
      out.panels.push_back(std::move(*found));
    } else {
      out.failures.push_back({useful.edge, fail.empty() ? "no test pair near the witnesses" : fail});
    }
  }
  return out;
}

namespace {

// Hop counts from a point to every vertex.
std::vector<int> hops_from(const RootedTree& t, Point p) {
  p = normalize(t.tree, p);
  std::vector<int> dist(t.tree.num_vertices(), -1);
  std::deque<int> queue;
  if (p.is_vertex()) {
    dist[p.vertex] = 0;
    queue.push_back(p.vertex);
  } else {
    for (int v : {t.tree.edge(p.edge).u, t.tree.edge(p.edge).v}) {
      dist[v] = 0;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, e] : t.tree.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

int min_hops(const std::vector<std::vector<int>>& from, const std::vector<int>& targets) {
  int best = std::numeric_limits<int>::max();
  for (const auto& d : from)
    for (int v : targets) best = std::min(best, d[v]);
  return best;
}

std::vector<int> root_vertices(const RootedTree& t, const RestrictedSubtree& a, const RestrictedSubtree& b) {
  std::vector<int> out;
  for (const auto* s : {&a, &b}) {
    Point r = normalize(t.tree, *s->root);
    if (r.is_vertex())
      out.push_back(r.vertex);
    else {
      out.push_back(t.tree.edge(r.edge).u);
      out.push_back(t.tree.edge(r.edge).v);
    }
  }
  return out;
}

}  // namespace

std::vector<TestPanel> sparsify(const std::vector<TestPanel>& panels, const BatteryParams& p, SparsifyMode mode) {
  std::vector<char> removed(panels.size(), 0);
  std::vector<TestPanel> kept;
  for (size_t i = 0; i < panels.size(); ++i) {
    if (removed[i]) continue;
    const TestPanel& a = panels[i];
    kept.push_back(a);
    const RootedTree& r1 = *a.y_sharp.ref;
    const RootedTree& r0 = *a.y0.ref;
    std::vector<std::vector<int>> from1{hops_from(r1, *a.y_sharp.root), hops_from(r1, *a.z_sharp.root)};
    std::vector<std::vector<int>> from0{hops_from(r0, *a.y0.root), hops_from(r0, *a.z0.root)};
    for (size_t j = i + 1; j < panels.size(); ++j) {
      if (removed[j]) continue;
      const TestPanel& b = panels[j];
      if (mode == SparsifyMode::candidate_tree) {
        auto targets = b.y_sharp.vertices();
        auto more = b.z_sharp.vertices();
        targets.insert(targets.end(), more.begin(), more.end());
        if (min_hops(from1, targets) <= 2 * p.gamma_t) removed[j] = 1;
      } else {
        if (min_hops(from1, root_vertices(r1, b.y_sharp, b.z_sharp)) <= 6 * p.gamma_t ||
            min_hops(from0, root_vertices(r0, b.y0, b.z0)) <= 6 * p.gamma_t)
          removed[j] = 1;
      }
    }
  }
  return kept;
}

std::vector<int> panel_forest(const TestPanel& panel, bool sharp_side, const BatteryParams& p) {
  const auto& y = sharp_side ? panel.y_sharp : panel.y0;
  const auto& z = sharp_side ? panel.z_sharp : panel.z0;
  Proximity prox = sharp_side ? panel.prox_sharp : panel.prox0;
  if (prox != Proximity::non_proximal) return linkage(y, z);
  auto a = topping(y, p.gamma_t), b = topping(z, p.gamma_t);
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

ValidationReport validate_battery(const Battery& b) {
  ValidationReport r;
  auto fail = [&](std::string s) {
    if (r.ok) r.first_failure = s;
    r.ok = false;
    r.failures.push_back(std::move(s));
  };
  for (size_t i = 0; i < b.panels.size(); ++i) {
    auto f = requirement_failure(b.panels[i], b.params);
    if (!f.empty()) fail("panel " + std::to_string(i) + ": " + f);
  }
  for (bool sharp : {false, true}) {
    std::vector<std::vector<int>> forests;
    for (const auto& panel : b.panels) forests.push_back(panel_forest(panel, sharp, b.params));
    for (size_t i = 0; i < forests.size(); ++i)
      for (size_t j = i + 1; j < forests.size(); ++j) {
        std::vector<int> common;
        std::set_intersection(forests[i].begin(), forests[i].end(), forests[j].begin(), forests[j].end(),
                              std::back_inserter(common));
        if (!common.empty())
          fail("global-intersection: panels " + std::to_string(i) + " and " + std::to_string(j) + " in the " +
               (sharp ? "candidate" : "reference") + " tree");
      }
  }
  return r;
}

namespace {

Units max_units(const Phylogeny& t) {
  Units m = 0;
  for (const auto& e : t.edges()) m = std::max(m, e.units);
  return m;
}

bool is_homogeneous_pair(const Phylogeny& a, const Phylogeny& b) {
  try {
    return homogeneous_layout(a).h == homogeneous_layout(b).h;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace

Battery build_battery(const Phylogeny& t0, const Phylogeny& t_sharp, const BuildOptions& opts, BuildReport* report) {
  if (t0.upsilon() != t_sharp.upsilon()) throw std::invalid_argument("trees must share the weight grid");
  BuildReport rep;
  Units g_units = std::max(max_units(t0), max_units(t_sharp));
  double g = static_cast<double>(g_units) / t0.upsilon();
  int ell = opts.ell ? *opts.ell : default_ell(g, 1);
  Coloring col = color_vertices(t0, t_sharp, ell);
  Regime natural;
  Overlap ov;
  if (is_homogeneous_pair(t0, t_sharp)) {
    natural = Regime::homogeneous;
  } else {
    ov = compute_overlap(col);
    int n = t0.num_leaves();
    rep.blowup = n <= kBlowupExactMaxLeaves ? blowup_distance_exact(t0, t_sharp) : blowup_upper_bound(t0, t_sharp, ell);
    double c_overlap = opts.c_overlap.value_or(1.0);
    natural = static_cast<double>(ov.sharp_edges.size()) >= rep.blowup / (10 * c_overlap) && !ov.empty()
                  ? Regime::large_overlap
                  : Regime::many_red;
  }
  Regime regime = opts.regime.value_or(natural);
  rep.regime_mismatch = regime != natural;
  if (regime == Regime::large_overlap && !opts.ell) {
    ell = default_ell(g, 5);
    col = color_vertices(t0, t_sharp, ell);
  }
  if (regime != Regime::homogeneous) ov = compute_overlap(col);
  Battery b;
  b.regime = regime;
  b.params = default_params(regime, ell, g_units);
  if (opts.c_overlap) b.params.c_overlap = *opts.c_overlap;
  b.t0 = col.t0;
  b.t_sharp = col.t_sharp;
  PanelSet set;
  SparsifyMode mode = SparsifyMode::candidate_tree;
  switch (regime) {
    case Regime::homogeneous:
      set = build_panels_homogeneous(col, b.params);
      break;
    case Regime::many_red:
      col = recolor_black(col, ov);
      set = build_panels_many_r(col, b.params);
      break;
    case Regime::large_overlap:
      set = build_panels_large_overlap(col, ov, b.params);
      mode = SparsifyMode::both_trees;
      break;
  }
  rep.regime = regime;
  rep.red = col.count(Color::red);
  rep.yellow = col.count(Color::yellow);
  rep.black = col.count(Color::black);
  rep.overlap_sharp = static_cast<int>(ov.sharp_edges.size());
  rep.overlap0 = static_cast<int>(ov.t0_edges.size());
  rep.candidates = static_cast<int>(set.panels.size());
  rep.failures = set.failures;
  b.panels = sparsify(set.panels, b.params, mode);
  rep.validation = validate_battery(b);
  if (report) *report = rep;
  return b;
}

}  // namespace phylo
