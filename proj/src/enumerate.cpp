#include "phylo/enumerate.hpp"

#include <stdexcept>

namespace phylo {

namespace {

struct Builder {
  int n;
  Units units;
  Units upsilon;
  const std::function<void(const Phylogeny&)>& visit;
  // Vertices 0..n-1 are the leaves; internal vertices follow in creation order.
  std::vector<std::pair<int, int>> edges;
  int next_internal;

  void grow(int leaf) {
    if (leaf == n) {
      std::vector<Edge> es;
      for (auto [u, v] : edges) es.push_back({u, v, units});
      std::vector<int> leaf_vertex(n);
      for (int i = 0; i < n; ++i) leaf_vertex[i] = i;
      visit(Phylogeny::from_edges(next_internal, std::move(es), std::move(leaf_vertex), upsilon));
      return;
    }
    size_t m = edges.size();
    for (size_t e = 0; e < m; ++e) {
      auto [u, v] = edges[e];
      int w = next_internal++;
      edges[e] = {u, w};
      edges.push_back({w, v});
      edges.push_back({w, leaf});
      grow(leaf + 1);
      edges.pop_back();
      edges.pop_back();
      edges[e] = {u, v};
      --next_internal;
    }
  }
};

}  // namespace

void enumerate_topologies(int n, Units units, Units upsilon, const std::function<void(const Phylogeny&)>& visit,
                          int limit) {
  if (n < 3) throw std::invalid_argument("enumeration needs n >= 3");
  if (n > limit) throw std::length_error("n exceeds the enumeration limit");
  Builder b{n, units, upsilon, visit, {{0, n}, {1, n}, {2, n}}, n + 1};
  b.grow(3);
}

std::vector<Phylogeny> all_topologies(int n, Units units, Units upsilon, int limit) {
  std::vector<Phylogeny> out;
  enumerate_topologies(n, units, upsilon, [&](const Phylogeny& t) { out.push_back(t); }, limit);
  return out;
}

long long double_factorial(int k) {
  long long r = 1;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace phylo
