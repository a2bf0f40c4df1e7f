#include "phylo/battery_json.hpp"

#include "phylo/newick.hpp"

namespace phylo {

namespace {

using nlohmann::json;

// Some leaf reachable from `from` without passing through `avoid`.
int leaf_beyond(const Phylogeny& t, int from, int avoid) {
  std::vector<std::pair<int, int>> stack{{from, avoid}};
  while (!stack.empty()) {
    auto [v, prev] = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) return v;
    for (auto [w, e] : t.neighbors(v))
      if (w != prev) stack.push_back({w, v});
  }
  throw std::logic_error("no leaf beyond vertex");
}

template <class E>
E enum_from(const std::string& s, std::initializer_list<E> all, const char* (*name)(E)) {
  for (E e : all)
    if (s == name(e)) return e;
  throw std::invalid_argument("unknown name: " + s);
}

json subtree_to_json(const RestrictedSubtree& y) {
  json labels = json::array();
  for (int a : y.labels) labels.push_back(a + 1);
  return {{"labels", labels}, {"root", point_to_json(*y.ref, *y.root)}};
}

RestrictedSubtree subtree_from_json(const TreeRef& t, const json& j) {
  std::vector<int> labels;
  for (int a : j.at("labels")) labels.push_back(a - 1);
  Point root = point_from_json(*t, j.at("root"));
  std::vector<int> extra;
  if (root.is_vertex()) extra.push_back(root.vertex);
  return with_root(restrict_to(t, labels, extra), root);
}

json tree_to_json(const RootedTree& t) {
  return {{"newick", to_newick(t.tree)}, {"root", point_to_json(t, Point::at(t.view.root))}};
}

TreeRef tree_from_json(const json& j, Units upsilon) {
  auto unrooted = make_rooted(parse_newick(j.at("newick"), upsilon));
  Point root = point_from_json(*unrooted, j.at("root"));
  if (!root.is_vertex()) throw std::invalid_argument("tree root must be a vertex");
  const Phylogeny& t = unrooted->tree;
  bool designate = t.degree(root.vertex) == 2;
  return make_rooted(designate ? t.with_root(root.vertex) : t.with_root(std::nullopt), root.vertex);
}

}  // namespace

json point_to_json(const RootedTree& rt, Point p) {
  const Phylogeny& t = rt.tree;
  p = normalize(t, p);
  int a, b;
  Units from_a;
  if (p.is_vertex()) {
    int x = p.vertex;
    if (t.is_leaf(x)) {
      a = b = x;
    } else {
      auto nb = t.neighbors(x);
      a = leaf_beyond(t, nb[0].vertex, x);
      b = leaf_beyond(t, nb[1].vertex, x);
    }
    from_a = rt.view.distance(a, x);
  } else {
    const Edge& e = t.edge(p.edge);
    a = leaf_beyond(t, e.u, e.v);
    b = leaf_beyond(t, e.v, e.u);
    from_a = rt.view.distance(a, e.u) + p.offset;
  }
  return {{"path", {t.label_of(a) + 1, t.label_of(b) + 1}}, {"from_first", from_a}};
}

Point point_from_json(const RootedTree& t, const json& j) {
  int a = j.at("path").at(0).get<int>() - 1;
  int b = j.at("path").at(1).get<int>() - 1;
  return locate_on_path(t, t.tree.leaf_vertex(a), t.tree.leaf_vertex(b), j.at("from_first").get<Units>());
}

json battery_to_json(const Battery& b) {
  const auto& p = b.params;
  json panels = json::array();
  for (const auto& t : b.panels) {
    panels.push_back({{"origin", origin_name(t.origin)},
                      {"alpha", t.alpha},
                      {"reference", {{"y", subtree_to_json(t.y0)}, {"z", subtree_to_json(t.z0)}, {"distance", t.d0},
                                     {"hops", t.graph0}, {"proximity", proximity_name(t.prox0)}}},
                      {"candidate", {{"y", subtree_to_json(t.y_sharp)}, {"z", subtree_to_json(t.z_sharp)},
                                     {"distance", t.d_sharp}, {"hops", t.graph_sharp},
                                     {"proximity", proximity_name(t.prox_sharp)}}}});
  }
  return {{"regime", regime_name(b.regime)},
          {"upsilon", b.t0->tree.upsilon()},
          {"params", {{"ell", p.ell}, {"wp", p.wp}, {"gamma", p.gamma}, {"gamma_t", p.gamma_t},
                      {"g_units", p.g_units}, {"beta", p.beta}, {"c_overlap", p.c_overlap}}},
          {"reference", tree_to_json(*b.t0)},
          {"candidate", tree_to_json(*b.t_sharp)},
          {"panels", panels}};
}

Battery battery_from_json(const json& j) {
  Battery b;
  b.regime = enum_from<Regime>(j.at("regime"), {Regime::homogeneous, Regime::many_red, Regime::large_overlap},
                               regime_name);
  Units upsilon = j.at("upsilon");
  const json& p = j.at("params");
  b.params = {p.at("ell"), p.at("wp"), p.at("gamma"), p.at("gamma_t"), p.at("g_units"), p.at("beta"), p.at("c_overlap")};
  b.t0 = tree_from_json(j.at("reference"), upsilon);
  b.t_sharp = tree_from_json(j.at("candidate"), upsilon);
  auto prox = [](const json& s) {
    return enum_from<Proximity>(s, {Proximity::proximal, Proximity::semi_proximal, Proximity::non_proximal},
                                proximity_name);
  };
  for (const auto& q : j.at("panels")) {
    TestPanel t;
    const json& r = q.at("reference");
    const json& c = q.at("candidate");
    t.y0 = subtree_from_json(b.t0, r.at("y"));
    t.z0 = subtree_from_json(b.t0, r.at("z"));
    t.y_sharp = subtree_from_json(b.t_sharp, c.at("y"));
    t.z_sharp = subtree_from_json(b.t_sharp, c.at("z"));
    t.y_vertex = t.y0.root->vertex;
    t.z_vertex = t.z0.root->vertex;
    t.d0 = r.at("distance");
    t.d_sharp = c.at("distance");
    t.graph0 = r.at("hops");
    t.graph_sharp = c.at("hops");
    t.prox0 = prox(r.at("proximity"));
    t.prox_sharp = prox(c.at("proximity"));
    t.alpha = q.at("alpha");
    t.origin = enum_from<PanelOrigin>(q.at("origin"),
                                      {PanelOrigin::homogeneous, PanelOrigin::cohanging, PanelOrigin::far,
                                       PanelOrigin::close, PanelOrigin::overlap},
                                      origin_name);
    b.panels.push_back(std::move(t));
  }
  return b;
}

}  // namespace phylo
