#pragma once

#include <cstdint>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Exact single-site divergences by enumeration of leaf patterns.
double kl_divergence(const Phylogeny& p, const Phylogeny& q);
double tv_single_site(const Phylogeny& p, const Phylogeny& q);

struct McEstimate {
  double mean;
  double std_error;
};

// TV between k-site distributions as E_p[(1 - q/p)^+] over sampled alignments.
McEstimate estimate_tv_k(const Phylogeny& p, const Phylogeny& q, int k, int trials, std::uint64_t seed,
                         int threads = 1);

struct LrErrors {
  // P_null[alternative scores at least as well], P_alt[alternative scores worse].
  McEstimate type1;
  McEstimate type2;
};

LrErrors lr_test_errors(const Phylogeny& null_tree, const Phylogeny& alt_tree, int k, int trials, std::uint64_t seed,
                        int threads = 1);

}  // namespace phylo
