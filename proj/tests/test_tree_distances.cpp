#include <algorithm>
#include <cmath>
#include <functional>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "phylo/blowup.hpp"
#include "phylo/enumerate.hpp"
#include "phylo/newick.hpp"
#include "phylo/random_tree.hpp"
#include "phylo/rng.hpp"
#include "phylo/swap.hpp"
#include "phylo/tree_metric.hpp"

using namespace phylo;

namespace {

// Swap distance by BFS over raw labelings, stopping at any labeling with the target metric.
int labeling_bfs(int h, const std::vector<int>& from, const TreeMetric& goal) {
  std::map<std::vector<int>, int> dist{{from, 0}};
  std::deque<std::vector<int>> queue{from};
  while (!queue.empty()) {
    auto lab = queue.front();
    queue.pop_front();
    if (tree_metric(build_homogeneous(h, 2, 10, lab)) == goal) return dist[lab];
    auto t = build_homogeneous(h, 2, 10, lab);
    for (auto m : legal_swaps(h)) {
      auto next = homogeneous_layout(swap_apply(t, m)).labeling;
      if (dist.emplace(next, dist[lab] + 1).second) queue.push_back(next);
    }
  }
  return -1;
}

// Canonical forms of every phylogeny reachable by one move removing and re-adding `b` edges.
std::set<std::string> single_moves(const Phylogeny& t, int b, Units f, Units g) {
  std::set<std::string> out;
  int nv = t.num_vertices() + b;
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < nv; ++u)
    for (int v = u + 1; v < nv; ++v) pairs.push_back({u, v});
  std::vector<int> rem(b);
  std::function<void(int, int)> pick_removed = [&](int i, int start) {
    if (i == b) {
      std::vector<int> add(b);
      std::function<void(int, int)> pick_added = [&](int j, int from) {
        if (j == b) {
          std::vector<Units> w(b, f);
          while (true) {
            BlowupMove m{rem, {}};
            for (int k = 0; k < b; ++k) m.added.push_back({pairs[add[k]].first, pairs[add[k]].second, w[k]});
            try {
              out.insert(canonical_form(blowup_apply(t, m)));
            } catch (const std::invalid_argument&) {
            }
            int k = 0;
            while (k < b && ++w[k] > g) w[k++] = f;
            if (k == b) break;
          }
          return;
        }
        for (int p = from; p < static_cast<int>(pairs.size()); ++p) {
          add[j] = p;
          pick_added(j + 1, p + 1);
        }
      };
      pick_added(0, 0);
      return;
    }
    for (int e = start; e < t.num_edges(); ++e) {
      rem[i] = e;
      pick_removed(i + 1, e + 1);
    }
  };
  pick_removed(0, 0);
  return out;
}

Phylogeny random_grid_tree(int n, Rng& rng) { return random_phylogeny(n, 1, 3, 10, rng()); }

}  // namespace

TEST_CASE("homogeneous layout and swap_apply") {
  auto t = build_homogeneous(3, 2, 10, {3, 1, 4, 0, 7, 5, 2, 6});
  auto lay = homogeneous_layout(t);
  CHECK(lay.h == 3);
  CHECK(lay.labeling == std::vector<int>{3, 1, 4, 0, 7, 5, 2, 6});

  // Leaves 7 and 9 sit in different cherries.
  auto s = swap_apply(t, {7, 9});
  CHECK(homogeneous_layout(s).labeling == std::vector<int>{4, 1, 3, 0, 7, 5, 2, 6});
  CHECK_FALSE(tree_metric(s) == tree_metric(t));
  CHECK(tree_metric(swap_apply(s, {7, 9})) == tree_metric(t));

  CHECK_THROWS(swap_apply(t, {7, 8}));  // siblings
  CHECK_THROWS(swap_apply(t, {3, 7}));  // different levels
  CHECK_THROWS(homogeneous_layout(random_phylogeny(4, 1, 3, 10, 1)));
  CHECK_THROWS(swap_apply(t, {1, 2}));  // the root's children are siblings
}

TEST_CASE("swap neighbourhoods") {
  CHECK(swap_neighbors(build_homogeneous(1, 2, 10)).raw_moves == 0);
  for (int h = 1; h <= 5; ++h) {
    int n = 1 << h;
    auto nb = swap_neighbors(build_homogeneous(h, 2, 10));
    long long expect = 0;
    for (int d = 1; d <= h; ++d) expect += (1LL << d) * ((1LL << d) - 1) / 2 - (1LL << (d - 1));
    CHECK(nb.raw_moves == expect);
    CHECK(nb.raw_moves <= static_cast<long long>(2 * n - 2) * (n - 2));
    CHECK(nb.raw_moves <= 2LL * n * n);
  }
  auto h2 = swap_neighbors(build_homogeneous(2, 2, 10));
  CHECK(h2.raw_moves == 4);
  CHECK(h2.neighbors.size() == 2);

  auto ball = swap_ball_sizes(build_homogeneous(2, 2, 10), 2);
  CHECK(ball == std::vector<long long>{1, 3, 3});
  auto ball3 = swap_ball_sizes(build_homogeneous(3, 2, 10), 7);
  for (int d = 0; d <= 7; ++d) CHECK(ball3[d] <= std::pow(2.0 * 64, d));
  CHECK(ball3.back() == 315);
}

TEST_CASE("swap_distance_exact") {
  std::vector<int> ids(4);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::vector<int>> labs;
  do labs.push_back(ids);
  while (std::next_permutation(ids.begin(), ids.end()));
  for (const auto& x : labs)
    for (const auto& y : labs) {
      auto a = build_homogeneous(2, 2, 10, x), b = build_homogeneous(2, 2, 10, y);
      int d = swap_distance_exact(a, b);
      CHECK(d == swap_distance_exact(b, a));
      CHECK(d == labeling_bfs(2, x, tree_metric(b)));
      CHECK(d <= 1);  // three classes, each one swap from the others
      CHECK((d == 0) == (tree_metric(a) == tree_metric(b)));
    }

  Rng rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<int> x(8), y(8);
    std::iota(x.begin(), x.end(), 0);
    std::iota(y.begin(), y.end(), 0);
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    auto a = build_homogeneous(3, 2, 10, x), b = build_homogeneous(3, 2, 10, y);
    int d = swap_distance_exact(a, b);
    CHECK(d == labeling_bfs(3, x, tree_metric(b)));
    CHECK(d == swap_distance_exact(b, a));
    CHECK(d <= 7);
  }

  auto t = build_homogeneous(3, 2, 10);
  for (auto m : legal_swaps(3)) {
    auto s = swap_apply(t, m);
    CHECK(swap_distance_exact(t, s) == (tree_metric(s) == tree_metric(t) ? 0 : 1));
  }
  CHECK_THROWS_AS(swap_distance_exact(build_homogeneous(4, 2, 10), build_homogeneous(4, 2, 10)), std::length_error);
  CHECK_THROWS_AS(swap_distance_exact(build_homogeneous(2, 2, 10), build_homogeneous(2, 3, 10)), std::invalid_argument);
}

TEST_CASE("blowup_apply") {
  auto t = parse_newick("(1:0.1,2:0.2,(3:0.1,4:0.3):0.2);", 10);
  int internal = -1;
  for (int e = 0; e < t.num_edges(); ++e)
    if (!t.is_leaf(t.edge(e).u) && !t.is_leaf(t.edge(e).v)) internal = e;
  BlowupMove m{{internal}, {{t.edge(internal).u, t.edge(internal).v, 3}}};
  auto s = blowup_apply(t, m);
  CHECK(blowup_distance_exact(t, s) == 1);
  CHECK(canonical_topology(s) == canonical_topology(t));

  BlowupMove bad{{internal}, {{t.leaf_vertex(0), t.leaf_vertex(1), 3}}};
  CHECK_THROWS_AS(blowup_apply(t, bad), InvalidTree);
}

TEST_CASE("blowup_distance_exact") {
  auto t = parse_newick("(1:0.1,2:0.2,(3:0.1,4:0.3):0.2);", 10);
  CHECK(blowup_distance_exact(t, parse_newick("((4:0.3,3:0.1):0.2,1:0.1,2:0.2);", 10)) == 0);

  // Exact search agrees with explicit single-move enumeration at n = 4.
  Rng rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    auto a = random_grid_tree(4, rng);
    auto one = single_moves(a, 1, 1, 3);
    std::set<std::string> within_one;
    for (const auto& topo : all_topologies(4, 1, 10)) {
      std::vector<Units> u(5, 1);
      while (true) {
        auto c = topo;
        for (int e = 0; e < 5; ++e) c = c.with_units(e, u[e]);
        if (blowup_distance_exact(a, c) <= 1) within_one.insert(canonical_form(c));
        int e = 0;
        while (e < 5 && ++u[e] > 3) u[e++] = 1;
        if (e == 5) break;
      }
    }
    CHECK(one == within_one);
  }
  {
    auto a = random_phylogeny(4, 1, 2, 10, 99);
    auto two = single_moves(a, 2, 1, 2);
    CHECK(static_cast<long long>(two.size()) == blowup_ball_size(a, 2, 1, 2));
  }

  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + trial % 4;
    auto a = random_grid_tree(n, rng), b = random_grid_tree(n, rng);
    auto sol = blowup_solve_exact(a, b);
    CHECK(sol.distance == blowup_distance_exact(b, a));
    CHECK(sol.distance <= 2 * n - 3);
    auto move = move_from_map(a, b, sol.map);
    CHECK(move.size() == sol.distance);
    CHECK(canonical_form(blowup_apply(a, move)) == canonical_form(b));
    CHECK(blowup_bound_from_map(a, b, {}) >= sol.distance);
  }

  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + trial % 3;
    auto a = random_grid_tree(n, rng), b = random_grid_tree(n, rng), c = random_grid_tree(n, rng);
    CHECK(blowup_distance_exact(a, c) <= blowup_distance_exact(a, b) + blowup_distance_exact(b, c));
  }

  auto rooted = build_homogeneous(2, 2, 10);
  CHECK(blowup_distance_exact(rooted, rooted.unrooted()) == 0);
  CHECK_THROWS(blowup_distance_exact(random_grid_tree(4, rng), random_grid_tree(5, rng)));
}

TEST_CASE("blow-up neighbourhood counts") {
  auto t = parse_newick("(1:0.1,2:0.2,(3:0.1,4:0.3):0.2);", 10);
  CHECK(blowup_ball_size(t, 0, 1, 4) == 1);
  long long one = blowup_ball_size(t, 1, 1, 4);
  long long two = blowup_ball_size(t, 2, 1, 4);
  CHECK(one == 1 + 5 * 3);
  CHECK(one <= two);
  CHECK(blowup_neighborhood_bound(4, 4, 1) == doctest::Approx(768));
  CHECK(blowup_neighborhood_count_check(t, 1, 1, 4));
  CHECK(blowup_neighborhood_count_check(t, 2, 1, 4));
}
