#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "phylo/enumerate.hpp"
#include "phylo/newick.hpp"
#include "phylo/phylogeny.hpp"
#include "phylo/random_tree.hpp"
#include "phylo/subtree.hpp"
#include "phylo/tree_metric.hpp"

using namespace phylo;

TEST_CASE("build_homogeneous") {
  SUBCASE("single leaf") {
    auto t = build_homogeneous(0, 2, 10, {0});
    CHECK(t.num_leaves() == 1);
    CHECK(t.num_edges() == 0);
  }
  SUBCASE("h=2") {
    auto t = build_homogeneous(2, 2, 10);
    CHECK(t.num_leaves() == 4);
    CHECK(t.num_edges() == 6);
    for (int e = 0; e < 6; ++e) CHECK(t.weight(e) == doctest::Approx(0.2));
  }
  SUBCASE("h=3 leaves at depth 3") {
    auto t = build_homogeneous(3, 3, 10);
    RootedView view(t, *t.root());
    for (int a = 0; a < 8; ++a) CHECK(view.depth[t.leaf_vertex(a)] == 3);
  }
  SUBCASE("bad labeling") {
    CHECK_THROWS_AS(build_homogeneous(2, 2, 10, {0, 1, 2}), InvalidTree);
    CHECK_THROWS_AS(build_homogeneous(2, 2, 10, {0, 1, 1, 2}), InvalidTree);
  }
}

TEST_CASE("phylogeny invariants are enforced") {
  CHECK_THROWS_AS(Phylogeny::from_edges(3, {{0, 1, 1}, {1, 2, 1}}, {0, 2}, 10), InvalidTree);  // degree-2 non-root
  CHECK_NOTHROW(Phylogeny::from_edges(3, {{0, 1, 1}, {1, 2, 1}}, {0, 2}, 10, 1));
  CHECK_THROWS_AS(Phylogeny::from_edges(2, {{0, 1, 0}}, {0, 1}, 10), InvalidTree);  // zero weight
  CHECK_THROWS_AS(Phylogeny::from_edges(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}}, {0, 2}, 10), InvalidTree);
}

TEST_CASE("tree_metric") {
  SUBCASE("two leaves") {
    auto t = Phylogeny::from_edges(2, {{0, 1, 5}}, {0, 1}, 10);
    auto m = tree_metric(t);
    CHECK(m.distance(0, 1) == doctest::Approx(0.5));
    CHECK(m.graph(0, 1) == 1);
  }
  SUBCASE("homogeneous h=2") {
    auto m = tree_metric(build_homogeneous(2, 2, 10));
    CHECK(m.distance(0, 1) == doctest::Approx(0.4));
    CHECK(m.distance(0, 2) == doctest::Approx(0.8));
  }
  SUBCASE("matches Floyd-Warshall and the four-point condition") {
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 2 + trial % 11;
      auto t = random_phylogeny(n, 1, 5, 10, trial);
      auto m = tree_metric(t);
      auto du = oracle::floyd(t, false);
      auto dg = oracle::floyd(t, true);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          REQUIRE(m.units(a, b) == du[t.leaf_vertex(a)][t.leaf_vertex(b)]);
          REQUIRE(m.graph(a, b) == dg[t.leaf_vertex(a)][t.leaf_vertex(b)]);
        }
      REQUIRE(check_four_point(m));
    }
  }
}

TEST_CASE("check_four_point") {
  // d(1,2)+d(3,4) strictly exceeds both other pairings.
  std::vector<Units> u = {0, 10, 3, 3,  //
                          10, 0, 3, 3,  //
                          3, 3, 0, 10,  //
                          3, 3, 10, 0};
  CHECK_FALSE(check_four_point(TreeMetric::from_units(4, 10, u)));
  CHECK(check_four_point(TreeMetric::from_units(3, 10, {0, 1, 2, 1, 0, 3, 2, 3, 0})));
}

TEST_CASE("quartet_topology") {
  // ab|cd, pendant 0.1, internal 0.2.
  auto t = parse_newick("((1:0.1,2:0.1):0.2,3:0.1,4:0.1);", 10);
  auto m = tree_metric(t);
  CHECK(quartet_topology(m, 0, 1, 2, 3).split == Split::ab_cd);
  CHECK(quartet_topology(m, 0, 2, 1, 3).split == Split::ac_bd);
  auto star = TreeMetric::from_units(4, 10, {0, 2, 2, 2, 2, 0, 2, 2, 2, 2, 0, 2, 2, 2, 2, 0});
  CHECK(quartet_topology(star, 0, 1, 2, 3).split == Split::degenerate);
  // Homogeneous h=2 with identity labels: cherries are {0,1} and {2,3}.
  auto h = tree_metric(build_homogeneous(2, 2, 10));
  CHECK(quartet_topology(h, 0, 2, 1, 3).split == Split::ac_bd);
}

TEST_CASE("newick round trip") {
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 12;
    int upsilon = trial % 3 == 0 ? 10 : (trial % 3 == 1 ? 7 : 100);
    auto t = random_phylogeny(n, 1, 3 * upsilon / 2, upsilon, 1000 + trial);
    auto text = to_newick(t);
    auto back = parse_newick(text, upsilon);
    REQUIRE(tree_metric(back) == tree_metric(t));
    REQUIRE(to_newick(back) == text);
  }
  auto h = build_homogeneous(3, 2, 10);
  auto back = parse_newick(to_newick(h), 10);
  CHECK(back.root().has_value());
  CHECK(tree_metric(back) == tree_metric(h));
  CHECK_THROWS_AS(parse_newick("((1:0.15,2:0.1):0.2,3:0.1,4:0.1);", 10), InvalidTree);
  CHECK_THROWS_AS(parse_newick("((1:0.1,2:0.1):0.2,3:0.1,5:0.1);", 10), InvalidTree);
}

TEST_CASE("enumerate_topologies") {
  for (int n = 4; n <= 7; ++n) {
    std::set<std::string> seen;
    long long count = 0;
    enumerate_topologies(n, 1, 10, [&](const Phylogeny& t) {
      ++count;
      seen.insert(canonical_topology(t));
    });
    CHECK(count == double_factorial(2 * n - 5));
    CHECK(static_cast<long long>(seen.size()) == count);
  }
  CHECK_THROWS(enumerate_topologies(9, 1, 10, [](const Phylogeny&) {}));
}

TEST_CASE("equal metrics imply equal topologies") {
  auto trees = all_topologies(6, 2, 10);
  std::map<std::vector<Units>, std::string> by_metric;
  for (const auto& t : trees) {
    auto [it, fresh] = by_metric.emplace(tree_metric(t).raw_units(), canonical_topology(t));
    if (!fresh) CHECK(it->second == canonical_topology(t));
  }
  CHECK(by_metric.size() == trees.size());
}

TEST_CASE("restricted subtrees and matching") {
  auto t0 = make_rooted(build_homogeneous(3, 2, 10));
  // Swap leaves 1 and 2 (labels), both in distinct cherries.
  auto t1 = make_rooted(build_homogeneous(3, 2, 10, {0, 2, 1, 3, 4, 5, 6, 7}));
  auto y = restrict_to(t0, {4, 5, 6, 7});
  CHECK(y.edges.size() == 6);
  CHECK(is_metric_matching(y, y));
  CHECK(is_metric_matching(y, restrict_to(t1, {4, 5, 6, 7})));
  CHECK_FALSE(is_metric_matching(restrict_to(t0, {0, 1, 2}), restrict_to(t1, {0, 1, 2})));
  auto perturbed = make_rooted(t0->tree.with_units(t0->tree.edge_between(t0->tree.leaf_vertex(4), 5), 3));
  CHECK_FALSE(is_metric_matching(y, restrict_to(perturbed, {4, 5, 6, 7})));
  CHECK_THROWS(restrict_to(t0, {8}));

  SUBCASE("restrict then self-match on random trees") {
    for (int trial = 0; trial < 50; ++trial) {
      auto t = make_rooted(random_phylogeny(10, 1, 5, 10, 77 + trial));
      std::vector<int> labels;
      for (int a = 0; a < 10; ++a)
        if ((trial >> (a % 5)) & 1 || a == 0) labels.push_back(a);
      auto r = restrict_to(t, labels);
      CHECK(is_metric_matching(r, r));
    }
  }
  SUBCASE("image points land at matching distances") {
    auto z0 = with_root(restrict_to(t0, {4, 5, 6, 7}), Point::at(t0->tree.leaf_vertex(4)));
    int top = t0->view.lca(t0->tree.leaf_vertex(4), t0->tree.leaf_vertex(7));
    auto img = image_point(z0, restrict_to(t1, {4, 5, 6, 7}), Point::at(top));
    REQUIRE(img.has_value());
    CHECK(img->is_vertex());
    CHECK(point_distance(*t1, *img, Point::at(t1->tree.leaf_vertex(6))) == 4);
  }
}

TEST_CASE("points on edges") {
  auto t = make_rooted(parse_newick("((1:0.3,2:0.1):0.2,3:0.1,4:0.1);", 10));
  int a = t->tree.leaf_vertex(0), b = t->tree.leaf_vertex(2);
  auto p = locate_on_path(*t, a, b, 2);
  CHECK_FALSE(p.is_vertex());
  CHECK(point_distance(*t, p, Point::at(a)) == 2);
  CHECK(point_distance(*t, p, Point::at(b)) == 4);
  CHECK(point_distance(*t, p, Point::at(t->tree.leaf_vertex(1))) == 2);
  CHECK(point_path_edges(*t, p, Point::at(a)).size() == 1);
  CHECK(point_path_edges(*t, p, Point::at(b)).size() == 3);
  CHECK(locate_on_path(*t, a, b, 3).is_vertex());
}

TEST_CASE("is_dense") {
  SUBCASE("complete binary subtree of height l") {
    for (int ell = 1; ell <= 4; ++ell) {
      auto t = make_rooted(build_homogeneous(ell, 1, 10));
      std::vector<int> all(1 << ell);
      for (int a = 0; a < (1 << ell); ++a) all[a] = a;
      auto y = with_root(restrict_to(t, all), Point::at(t->view.root));
      for (int wp = 0; wp < (1 << ell); ++wp) CHECK(is_dense(y, ell, wp));
    }
  }
  SUBCASE("path of length 2l") {
    for (int ell = 2; ell <= 4; ++ell) {
      RootedShape s;
      s.nodes.push_back({-1, 0, -1, {}});
      for (int i = 1; i <= 2 * ell; ++i) {
        s.nodes.push_back({i - 1, 1, i == 2 * ell ? 0 : -1, {}});
        s.nodes[i - 1].children.push_back(i);
      }
      CHECK_FALSE(is_dense(s, ell, 1));
    }
  }
  SUBCASE("explicit completion agrees with counting and density is monotone in wp") {
    for (int trial = 0; trial < 40; ++trial) {
      auto t = make_rooted(random_phylogeny(9, 1, 3, 10, 500 + trial));
      std::vector<int> labels{0, 1, 2, 3, 4, 5, 6, 7, 8};
      auto y = with_root(restrict_to(t, labels), Point::at(t->view.root));
      auto shape = shape_of(y);
      for (int ell = 1; ell <= 3; ++ell) {
        auto full = ell_completion(shape, ell);
        auto pop = level_populations(shape, ell);
        std::vector<int> depth(full.nodes.size(), 0);
        for (size_t i = 1; i < full.nodes.size(); ++i) depth[i] = depth[full.nodes[i].parent] + 1;
        for (size_t i = 0; i < pop.size(); ++i) {
          int count = 0;
          for (int d : depth) count += d == static_cast<int>(i) * ell;
          CHECK(pop[i] == count);
        }
        bool prev = false;
        for (int wp = 0; wp < (1 << ell); ++wp) {
          bool now = is_dense(shape, ell, wp);
          CHECK((now || !prev));
          prev = now;
        }
      }
    }
  }
}

TEST_CASE("co-hanging, linkage and topping") {
  auto t = make_rooted(build_homogeneous(3, 1, 10));
  const auto& view = t->view;
  auto leaf = [&](int a) { return t->tree.leaf_vertex(a); };
  auto y = with_root(restrict_to(t, {0, 1}), Point::at(view.parent[leaf(0)]));
  auto z = with_root(restrict_to(t, {2, 3}), Point::at(view.parent[leaf(2)]));
  CHECK(is_cohanging(y, z));
  CHECK(linkage(y, z).size() == 6);
  CHECK(topping(y, 2).size() == 4);
  CHECK(topping(y, 10).size() == 4);
  auto big = with_root(restrict_to(t, {0, 1, 2, 3}), Point::at(view.parent[view.parent[leaf(0)]]));
  CHECK_THROWS_AS(is_cohanging(big, z), SubtreeIntersection);
  // Rooting y at a leaf makes the path to z run through y.
  auto y_bad = with_root(restrict_to(t, {0, 1}), Point::at(leaf(0)));
  CHECK_FALSE(is_cohanging(y_bad, z));
}
