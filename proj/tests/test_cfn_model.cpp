#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "phylo/enumerate.hpp"
#include "phylo/likelihood.hpp"
#include "phylo/model.hpp"
#include "phylo/newick.hpp"
#include "phylo/random_tree.hpp"
#include "phylo/rng.hpp"
#include "phylo/sampler.hpp"

using namespace phylo;

TEST_CASE("delta_from_weight") {
  CHECK(delta_from_weight(0, 2) == 0);
  CHECK(delta_from_weight(std::log(2.0), 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(delta_from_weight(INFINITY, 4) == 0.25);
  CHECK(delta_from_weight(50, 4) == doctest::Approx(0.25));
  CHECK_THROWS(delta_from_weight(-0.1, 2));
}

TEST_CASE("transition_matrix") {
  SubstitutionModel model{4};
  double row = 0;
  for (int j = 0; j < 4; ++j) row += model.rate(0, j);
  CHECK(std::abs(row) < 1e-15);

  auto id = transition_matrix(0, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id.at(i, j) == (i == j ? 1.0 : 0.0));

  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    int r = 2 + trial % 4;
    double w1 = 2 * rng.uniform(), w2 = 2 * rng.uniform();
    auto a = transition_matrix(w1, r), b = transition_matrix(w2, r), c = transition_matrix(w1 + w2, r);
    for (int i = 0; i < r; ++i) {
      double sum = 0;
      for (int j = 0; j < r; ++j) {
        double prod = 0;
        for (int k = 0; k < r; ++k) prod += a.at(i, k) * b.at(k, j);
        CHECK(std::abs(prod - c.at(i, j)) < 1e-12);
        sum += a.at(i, j);
      }
      CHECK(std::abs(sum - 1) < 1e-12);
    }
  }
  // Matches exp(wQ) through its spectral form: eigenvalue 0 on constants and -1 elsewhere.
  auto m = transition_matrix(0.7, 3);
  CHECK(m.at(0, 0) == doctest::Approx(1.0 / 3 + 2.0 / 3 * std::exp(-0.7)));
  CHECK(m.at(0, 1) == doctest::Approx(1.0 / 3 - 1.0 / 3 * std::exp(-0.7)));
}

TEST_CASE("sample_markov") {
  auto t = Phylogeny::from_edges(2, {{0, 1, 693147}}, {0, 1}, 1000000);
  CHECK(sample_markov(t, 0, 1).sites() == 0);

  SUBCASE("P[same] at d = ln 2") {
    int k = 100000;
    auto a = sample_markov(t, k, 9);
    int same = 0;
    for (int i = 0; i < k; ++i) same += a.state(i, 0) == a.state(i, 1);
    double p = static_cast<double>(same) / k;
    double se = std::sqrt(0.75 * 0.25 / k);
    CHECK(std::abs(p - 0.75) < 3 * se);
  }
  SUBCASE("single leaf is uniform") {
    auto one = build_homogeneous(0, 1, 10, {0});
    auto a = sample_markov(one, 20000, 3);
    int plus = 0;
    for (int i = 0; i < a.sites(); ++i) plus += a.spin(i, 0) > 0;
    CHECK(std::abs(plus / 20000.0 - 0.5) < 3 * std::sqrt(0.25 / 20000));
  }
  SUBCASE("deterministic and prefix-stable") {
    auto h = build_homogeneous(3, 2, 10);
    CHECK(sample_markov(h, 100, 7) == sample_markov(h, 100, 7));
    CHECK(sample_markov(h, 200, 7).prefix(100) == sample_markov(h, 100, 7));
    CHECK_FALSE(sample_markov(h, 100, 7) == sample_markov(h, 100, 8));
  }
  SUBCASE("general r") {
    auto h = build_homogeneous(2, 3, 10);
    auto a = sample_markov(h, 1000, 5, 4);
    for (int i = 0; i < a.sites(); ++i)
      for (int j = 0; j < 4; ++j) CHECK(a.state(i, j) < 4);
  }
}

TEST_CASE("sample_random_cluster") {
  auto t = build_homogeneous(2, 1, 1000000);
  auto a = sample_random_cluster(t, 2000, 1);
  // Weight 1e-6: essentially every edge open.
  int agree = 0;
  for (int i = 0; i < a.sites(); ++i) agree += a.state(i, 0) == a.state(i, 3) && a.state(i, 1) == a.state(i, 2);
  CHECK(agree > 1990);
  CHECK_THROWS(sample_random_cluster(t, 10, 1, 4));
}

TEST_CASE("random-cluster distribution equals Markov distribution") {
  for (const char* nwk : {"((1:0.1,2:0.2):0.3,3:0.4,4:0.5);", "((1:0.3,3:0.3):0.3,2:0.3,4:0.3);",
                          "((1:1.2,4:0.1):0.7,2:0.2,3:0.9);"}) {
    auto t = parse_newick(nwk, 10);
    auto exact = exact_leaf_distribution(t);
    auto rc = oracle::random_cluster_distribution(t);
    for (size_t i = 0; i < exact.size(); ++i) CHECK(std::abs(exact[i] - rc[i]) < 1e-12);
  }
}

TEST_CASE("exact_leaf_distribution") {
  auto one = build_homogeneous(0, 1, 10, {0});
  auto d1 = exact_leaf_distribution(one);
  CHECK(d1[0] == doctest::Approx(0.5));
  CHECK(d1[1] == doctest::Approx(0.5));

  // ln 2 on a 1e-9 grid; (1/2) * (1 + e^{-ln 2}) / 2 = 0.375 up to the grid error.
  auto two = Phylogeny::from_edges(2, {{0, 1, 693147181}}, {0, 1}, 1000000000);
  CHECK(std::abs(exact_leaf_distribution(two)[0] - 0.375) < 1e-9);

  SUBCASE("root invariance and uniform marginals") {
    for (int trial = 0; trial < 30; ++trial) {
      int n = 2 + trial % 5;
      auto t = random_phylogeny(n, 1, 8, 10, 300 + trial);
      auto base = exact_leaf_distribution(t);
      double total = 0;
      for (double p : base) total += p;
      CHECK(std::abs(total - 1) < 1e-12);
      for (int v = 0; v < t.num_vertices(); ++v) {
        auto other = exact_leaf_distribution(t.with_root(v));
        for (size_t i = 0; i < base.size(); ++i) REQUIRE(std::abs(other[i] - base[i]) < 1e-12);
      }
      for (int a = 0; a < n; ++a) {
        double plus = 0;
        for (size_t i = 0; i < base.size(); ++i)
          if (((i >> a) & 1) == 0) plus += base[i];
        CHECK(std::abs(plus - 0.5) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(exact_leaf_distribution(build_homogeneous(5, 1, 10)), std::length_error);
}

TEST_CASE("two_point_correlation") {
  auto t = random_phylogeny(6, 1, 7, 10, 4);
  auto dist = exact_leaf_distribution(t);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double e = 0;
      for (size_t i = 0; i < dist.size(); ++i) e += dist[i] * (((i >> a) & 1) == ((i >> b) & 1) ? 1 : -1);
      CHECK(std::abs(e - two_point_correlation(t, a, b)) < 1e-12);
    }
  auto two = Phylogeny::from_edges(2, {{0, 1, 693147181}}, {0, 1}, 1000000000);
  CHECK(two_point_correlation(two, 0, 1) == doctest::Approx(0.5));
  CHECK(two_point_correlation(two, 0, 0) == 1);
  auto a = sample_markov(t, 50000, 11);
  double mean = 0;
  for (int i = 0; i < a.sites(); ++i) mean += a.spin(i, 0) * a.spin(i, 3);
  mean /= a.sites();
  double rho = two_point_correlation(t, 0, 3);
  CHECK(std::abs(mean - rho) < 3 * std::sqrt((1 - rho * rho) / a.sites()));
}

TEST_CASE("alignment io") {
  auto h = build_homogeneous(2, 2, 10);
  auto a = sample_markov(h, 50, 3);
  std::stringstream ss;
  write_alignment(ss, a);
  CHECK(read_alignment(ss) == a);
  std::stringstream empty("0 4 2\n");
  CHECK(read_alignment(empty).sites() == 0);
  std::stringstream minus("1 2 2\n+\xE2\x88\x92\n");
  CHECK(read_alignment(minus).spin(0, 1) == -1);
  std::stringstream bad("1 2 2\n+x\n");
  CHECK_THROWS_AS(read_alignment(bad), AlignmentFormatError);
  std::stringstream general("2 3 4\n012\n333\n");
  auto g = read_alignment(general);
  CHECK(g.state(0, 2) == 2);
  std::stringstream fasta(">2\nAC\n>1\nGt\n");
  auto f = read_fasta(fasta);
  CHECK(f.states() == 4);
  CHECK(f.state(0, 0) == 2);
  CHECK(f.state(1, 0) == 3);
  CHECK(f.state(1, 1) == 1);
}
