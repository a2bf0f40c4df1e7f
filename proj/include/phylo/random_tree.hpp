#pragma once

#include <cstdint>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Uniform random topology by stepwise addition; weights uniform on [f_units, g_units].
Phylogeny random_phylogeny(int n, Units f_units, Units g_units, Units upsilon, std::uint64_t seed);

// Uniformly random leaf labeling of a homogeneous tree.
Phylogeny random_homogeneous(int h, Units g_units, Units upsilon, std::uint64_t seed);

}  // namespace phylo
