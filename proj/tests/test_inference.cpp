#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "phylo/ancestral.hpp"
#include "phylo/divergence.hpp"
#include "phylo/enumerate.hpp"
#include "phylo/likelihood.hpp"
#include "phylo/ml.hpp"
#include "phylo/newick.hpp"
#include "phylo/random_tree.hpp"
#include "phylo/rng.hpp"
#include "phylo/sampler.hpp"
#include "phylo/subtree.hpp"

using namespace phylo;

namespace {

constexpr Units kFine = 1'000'000'000'000'000;  // grid fine enough for irrational hand values

std::vector<std::uint8_t> bytes(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("site_likelihood matches brute-force summation") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 3 + trial % 6;
    auto t = random_phylogeny(n, 1, 8, 10, 100 + trial);
    for (int p = 0; p < 20; ++p) {
      std::vector<int> s(n);
      for (auto& x : s) x = rng.below(2);
      CHECK(std::abs(site_likelihood(t, s) - oracle::brute_force_site(t, s)) < 1e-12);
    }
  }
}

TEST_CASE("site_likelihood hand values and normalization") {
  auto leaf = build_homogeneous(0, 1, 10);
  CHECK(site_likelihood(leaf, {0}) == doctest::Approx(0.5).epsilon(1e-15));

  // 0.375 = (1/2)(1 + 1/2)/2.
  auto pair = Phylogeny::from_edges(2, {{0, 1, 693147180559945}}, {0, 1}, kFine);
  CHECK(std::abs(site_likelihood(pair, {0, 0}) - 0.375) < 1e-12);

  auto t = random_phylogeny(7, 1, 20, 10, 9);
  double total = 0;
  for (std::uint64_t c = 0; c < 128; ++c) total += site_likelihood(t, decode_pattern(c, 7, 2));
  CHECK(std::abs(total - 1) < 1e-12);
  CHECK_THROWS(site_likelihood(t, {0, 1}));
}

TEST_CASE("log_likelihood") {
  auto t = random_phylogeny(6, 1, 6, 10, 3);
  CHECK(log_likelihood(t, sample_markov(t, 0, 1)).value == 0);

  auto a = sample_markov(t, 300, 4);
  auto once = log_likelihood(t, a);
  auto twice = log_likelihood(t, a.concat(a));
  CHECK(twice.value == doctest::Approx(2 * once.value).epsilon(1e-13));
  CHECK_FALSE(once.clamped);

  auto dist = exact_leaf_distribution(t);
  double expect = 0;
  for (int i = 0; i < a.sites(); ++i) {
    std::vector<std::uint8_t> row(a.row(i), a.row(i) + 6);
    expect -= std::log(dist[encode_pattern(row.data(), 6, 2)]);
  }
  CHECK(once.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ml_estimate candidate mode") {
  auto t0 = random_phylogeny(6, 2, 4, 10, 11);
  auto a = sample_markov(t0, 50, 2);
  MlSpace space;
  space.candidates = {t0};
  auto res = ml_estimate(a, space);
  CHECK(canonical_form(res.winner) == canonical_form(t0));
  CHECK(res.scored == 1);
  CHECK_FALSE(res.tie);

  space.candidates.clear();
  CHECK_THROWS_AS(ml_estimate(a, space), std::invalid_argument);

  // Two copies with the same metric tie; the canonical order decides.
  auto relabelled = parse_newick(to_newick(t0), 10);
  space.candidates = {relabelled, t0};
  res = ml_estimate(a, space);
  CHECK(res.tie);
  CHECK(canonical_form(res.winner) == canonical_form(t0));
}

TEST_CASE("ml_estimate exhaustive mode") {
  auto truth = parse_newick("(1:0.2,2:0.1,(3:0.1,4:0.2):0.2);", 10);
  auto a = sample_markov(truth, 20000, 8);
  MlSpace space;
  space.mode = MlMode::exhaustive;
  space.grid = {1, 2, 10};
  auto res = ml_estimate(a, space);
  CHECK(res.scored == 3 * 32);
  CHECK(canonical_topology(res.winner) == canonical_topology(truth));
  CHECK(canonical_form(res.winner) == canonical_form(truth));

  space.max_candidates = 50;
  CHECK_THROWS_AS(ml_estimate(a, space), std::length_error);
}

TEST_CASE("ml_estimate topology mode recovers the n=5 tree") {
  WeightGrid grid{1, 3, 10};
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto truth = random_phylogeny(5, 2, 2, 10, 500 + trial);
    auto a = sample_markov(truth, 10000, derive_seed(77, {static_cast<std::uint64_t>(trial)}));
    MlSpace space;
    space.mode = MlMode::topology;
    space.grid = grid;
    auto res = ml_estimate(a, space);
    hits += canonical_topology(res.winner) == canonical_topology(truth);
  }
  CHECK(hits >= 95);
}

TEST_CASE("coordinate descent reaches a single-edge local optimum") {
  auto truth = random_phylogeny(5, 1, 4, 10, 21);
  auto data = compress(sample_markov(truth, 4000, 5));
  WeightGrid grid{1, 4, 10};
  LogLikelihood best;
  auto fitted = optimize_branch_lengths(truth, data, grid, &best);
  for (int e = 0; e < fitted.num_edges(); ++e)
    for (Units u : grid.values()) {
      auto moved = fitted.with_units(e, u);
      CHECK(log_likelihood(Pruner(moved), data).value >= best.value - 1e-9 * best.value);
    }
}

TEST_CASE("ancestral posterior") {
  SUBCASE("root with one leaf child, hand value") {
    // Shape: root -> leaf 0 at weight 0.3.
    RootedShape s;
    s.upsilon = 10;
    s.nodes = {{-1, 0, -1, {1}}, {0, 3, 0, {}}};
    std::vector<std::uint8_t> plus{0};
    auto p = ancestral_posterior(s, plus.data());
    CHECK(std::abs(p.p_plus - (1 + std::exp(-0.3)) / 2) < 1e-12);
    CHECK(mle_root_state(p) == 1);
  }
  SUBCASE("opposite equidistant leaves tie to -1") {
    auto t = build_homogeneous(1, 2, 10);
    auto s = shape_of(t, 0);
    auto pm = bytes({0, 1});
    auto p = ancestral_posterior(s, pm.data());
    CHECK(std::abs(p.p_plus - 0.5) < 1e-12);
    CHECK(mle_root_state(p) == -1);
  }
  SUBCASE("matches brute force on random trees, all +1 gives +1") {
    for (int trial = 0; trial < 30; ++trial) {
      int n = 3 + trial % 5;
      auto t = random_phylogeny(n, 1, 9, 10, 900 + trial);
      int root = n + trial % (t.num_vertices() - n);
      auto s = shape_of(t, root);
      AncestralEstimator est(s);
      Rng rng(trial);
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> states(n);
        for (auto& x : states) x = rng.below(2);
        auto pat = bytes(states);
        auto p = est.posterior(pat.data());
        double a = oracle::brute_force_conditional(t, root, 0, states);
        double b = oracle::brute_force_conditional(t, root, 1, states);
        CHECK(std::abs(p.p_plus - a / (a + b)) < 1e-12);
        CHECK(std::abs(p.p_plus + p.p_minus - 1) < 1e-12);
      }
      std::vector<std::uint8_t> all_plus(n, 0);
      CHECK(est.estimate(all_plus.data()) == 1);
    }
  }
}

TEST_CASE("reconstruction accuracy") {
  auto leaf = build_homogeneous(0, 1, 10);
  auto acc = reconstruction_accuracy(shape_of(leaf, 0), EvalMode::exact);
  CHECK(acc.probability == 1.0);
  CHECK(acc.beta == 0.0);

  // h=1: ++ and -- are decided correctly, mixed patterns tie to -1, so accuracy = 1 - delta.
  auto cherry = build_homogeneous(1, 4, 10);
  double delta = 0.5 * (1 - std::exp(-0.4));
  acc = reconstruction_accuracy(shape_of(cherry, 0), EvalMode::exact);
  CHECK(std::abs(acc.probability - (1 - delta)) < 1e-12);
  CHECK(std::abs(acc.beta - 0.4) < 1e-12);

  auto deep = build_homogeneous(3, 2, 10);
  auto shape = shape_of(deep, 0);
  auto exact = reconstruction_accuracy(shape, EvalMode::exact);
  auto mc = reconstruction_accuracy(shape, EvalMode::monte_carlo, 40000, 3);
  CHECK(std::abs(exact.probability - mc.probability) < 4 * mc.std_error);

  auto [a_plus, a_minus] = conditional_estimate_means(shape);
  CHECK(std::abs((2 + a_plus - a_minus) / 4 - exact.probability) < 1e-12);
}

TEST_CASE("flow bound") {
  // h=1, weight g, flow 1/2 per edge: R = e^{2g} - 1, bound = 1 / (1 + (e^{2g} - 1)/2) = 2 / (1 + e^{2g}).
  auto t = build_homogeneous(1, 346573590279973, kFine);
  CHECK(std::abs(flow_bound(shape_of(t, 0)) - 2.0 / 3.0) < 1e-12);

  CHECK(flow_bound(shape_of(build_homogeneous(0, 1, 10), 0)) == 1.0);

  auto s = shape_of(build_homogeneous(2, 2, 10), 0);
  auto bad = equal_split_flow(s);
  bad[1] = 0.7;
  CHECK_THROWS_AS(flow_bound(s, bad), NonUnitFlow);
  auto skew = equal_split_flow(s);
  skew[1] = 0.7, skew[2] = 0.3, skew[3] = skew[4] = 0.35, skew[5] = skew[6] = 0.15;
  CHECK(flow_bound(s, skew) <= flow_bound(s) + 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + trial % 9;
    auto r = random_phylogeny(n, 1, 6, 10, 40 + trial);
    auto shape = shape_of(r, n);
    CHECK(flow_bound(shape) <= posterior_gap(shape, EvalMode::exact).mean + 1e-12);
  }

  auto h4 = shape_of(build_homogeneous(4, 2, 10), 0);
  auto gap = posterior_gap(h4, EvalMode::monte_carlo, 20000, 6);
  CHECK(gap.mean >= flow_bound(h4) - 3 * gap.std_error);
}

TEST_CASE("divergences") {
  auto q1 = parse_newick("(1:0.3,2:0.3,(3:0.3,4:0.3):0.3);", 10);
  auto q2 = parse_newick("(1:0.3,3:0.3,(2:0.3,4:0.3):0.3);", 10);
  CHECK(kl_divergence(q1, q1) == 0.0);
  CHECK(tv_single_site(q1, q1) == 0.0);

  double tv = 0;
  for (std::uint64_t c = 0; c < 16; ++c) {
    auto s = decode_pattern(c, 4, 2);
    tv += std::abs(oracle::brute_force_site(q1, s) - oracle::brute_force_site(q2, s));
  }
  CHECK(tv_single_site(q1, q2) == doctest::Approx(tv / 2).epsilon(1e-12));
  CHECK(tv_single_site(q1, q2) > 0);

  // Same metric, different vertex numbering.
  auto rebuilt = parse_newick("((4:0.3,3:0.3):0.3,2:0.3,1:0.3);", 10);
  CHECK(tv_single_site(q1, rebuilt) < 1e-15);

  auto trees = all_topologies(6, 3, 10);
  std::vector<std::vector<double>> dist;
  for (const auto& t : trees) dist.push_back(exact_leaf_distribution(t));
  for (size_t i = 0; i < trees.size(); ++i)
    for (size_t j = i + 1; j < trees.size(); ++j) {
      double kl = 0;
      for (size_t c = 0; c < dist[i].size(); ++c) kl += dist[i][c] * std::log(dist[i][c] / dist[j][c]);
      CHECK(kl > 1e-6);
    }
  CHECK(kl_divergence(trees[0], trees[1]) > 0);
}

TEST_CASE("estimate_tv_k") {
  auto q1 = parse_newick("(1:0.3,2:0.3,(3:0.3,4:0.3):0.3);", 10);
  auto q2 = parse_newick("(1:0.3,3:0.3,(2:0.3,4:0.3):0.3);", 10);
  auto same = estimate_tv_k(q1, q1, 20, 200, 1);
  CHECK(same.mean == 0.0);

  auto one = estimate_tv_k(q1, q2, 1, 4000, 2);
  CHECK(std::abs(one.mean - tv_single_site(q1, q2)) < 4 * one.std_error);

  double prev = 0;
  for (int k : {4, 16, 64}) {
    auto est = estimate_tv_k(q1, q2, k, 2000, 3);
    CHECK(est.mean >= prev - 3 * est.std_error);
    prev = est.mean;
  }
  auto serial = estimate_tv_k(q1, q2, 8, 300, 4, 1);
  auto threaded = estimate_tv_k(q1, q2, 8, 300, 4, 4);
  CHECK(serial.mean == threaded.mean);
}

TEST_CASE("lr_test_errors") {
  auto q1 = parse_newick("(1:0.3,2:0.3,(3:0.3,4:0.3):0.3);", 10);
  auto q2 = parse_newick("(1:0.3,3:0.3,(2:0.3,4:0.3):0.3);", 10);
  auto self = lr_test_errors(q1, q1, 10, 100, 1);
  CHECK(self.type1.mean == 1.0);
  CHECK(self.type2.mean == 0.0);

  auto small = lr_test_errors(q1, q2, 10, 2000, 2);
  auto large = lr_test_errors(q1, q2, 80, 2000, 2);
  CHECK(large.type1.mean + large.type2.mean < small.type1.mean + small.type2.mean);
  auto threaded = lr_test_errors(q1, q2, 10, 2000, 2, 3);
  CHECK(threaded.type1.mean == small.type1.mean);
}
