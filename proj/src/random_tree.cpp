#include "phylo/random_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "phylo/rng.hpp"

namespace phylo {

Phylogeny random_phylogeny(int n, Units f_units, Units g_units, Units upsilon, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (f_units < 1 || g_units < f_units) throw std::invalid_argument("bad weight range");
  Rng rng(derive_seed(seed, {0x7265ULL}));
  auto weight = [&] { return f_units + static_cast<Units>(rng.below(static_cast<int>(g_units - f_units + 1))); };
  std::vector<std::pair<int, int>> pairs;
  int next = n;
  if (n == 2) pairs.push_back({0, 1});
  if (n >= 3) {
    pairs = {{0, n}, {1, n}, {2, n}};
    next = n + 1;
    for (int leaf = 3; leaf < n; ++leaf) {
      int e = rng.below(static_cast<int>(pairs.size()));
      auto [u, v] = pairs[e];
      int w = next++;
      pairs[e] = {u, w};
      pairs.push_back({w, v});
      pairs.push_back({w, leaf});
    }
  }
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, weight()});
  std::vector<int> leaf_vertex(n);
  std::iota(leaf_vertex.begin(), leaf_vertex.end(), 0);
  return Phylogeny::from_edges(std::max(next, n), std::move(edges), std::move(leaf_vertex), upsilon);
}

Phylogeny random_homogeneous(int h, Units g_units, Units upsilon, std::uint64_t seed) {
  std::vector<int> labels(1 << h);
  std::iota(labels.begin(), labels.end(), 0);
  Rng rng(derive_seed(seed, {0x686fULL}));
  for (int i = static_cast<int>(labels.size()) - 1; i > 0; --i) std::swap(labels[i], labels[rng.below(i + 1)]);
  return build_homogeneous(h, g_units, upsilon, labels);
}

}  // namespace phylo
