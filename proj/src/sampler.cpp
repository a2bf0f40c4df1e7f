#include "phylo/sampler.hpp"

#include <stdexcept>

#include "phylo/model.hpp"
#include "phylo/rng.hpp"

namespace phylo {

namespace {

template <typename Step>
Alignment sample_with(const Phylogeny& t, int k, std::uint64_t seed, int r, Step step) {
  if (k < 0) throw std::invalid_argument("negative site count");
  RootedView view(t, t.effective_root());
  std::vector<double> delta(t.num_edges());
  for (int e = 0; e < t.num_edges(); ++e) delta[e] = delta_from_weight(t.weight(e), r);
  Alignment a(k, t.num_leaves(), r);
  std::vector<int> state(t.num_vertices());
  for (int site = 0; site < k; ++site) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(site)}));
    for (int v : view.preorder) {
      if (v == view.root)
        state[v] = rng.below(r);
      else
        state[v] = step(rng, state[view.parent[v]], delta[view.parent_edge[v]]);
    }
    for (int lab = 0; lab < t.num_leaves(); ++lab) a.set(site, lab, state[t.leaf_vertex(lab)]);
  }
  return a;
}

}  // namespace

Alignment sample_markov(const Phylogeny& t, int k, std::uint64_t seed, int r) {
  return sample_with(t, k, seed, r, [r](Rng& rng, int parent, double delta) {
    if (rng.uniform() < (r - 1) * delta) return (parent + 1 + rng.below(r - 1)) % r;
    return parent;
  });
}

Alignment sample_random_cluster(const Phylogeny& t, int k, std::uint64_t seed, int r) {
  if (r != 2) throw std::invalid_argument("random-cluster sampler requires r = 2");
  return sample_with(t, k, seed, r, [](Rng& rng, int parent, double delta) {
    // A closed edge starts a new component with a fresh uniform spin.
    if (rng.uniform() < 1.0 - 2.0 * delta) return parent;
    return rng.below(2);
  });
}

}  // namespace phylo
