#pragma once

#include <cstdint>

#include "phylo/alignment.hpp"
#include "phylo/phylogeny.hpp"

namespace phylo {

// Site j is drawn from its own stream derive_seed(seed, {j}), so prefixes agree across k.
Alignment sample_markov(const Phylogeny& t, int k, std::uint64_t seed, int r = 2);
// Percolation form of the two-state process; each edge is open w.p. 1 - 2*delta.
Alignment sample_random_cluster(const Phylogeny& t, int k, std::uint64_t seed, int r = 2);

}  // namespace phylo
