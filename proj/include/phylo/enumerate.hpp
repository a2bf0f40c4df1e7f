#pragma once

#include <functional>
#include <vector>

#include "phylo/phylogeny.hpp"

namespace phylo {

inline constexpr int kDefaultEnumerationLimit = 8;

// Visits every unrooted leaf-labeled binary topology on n leaves once, all edges `units` long.
void enumerate_topologies(int n, Units units, Units upsilon, const std::function<void(const Phylogeny&)>& visit,
                          int limit = kDefaultEnumerationLimit);
std::vector<Phylogeny> all_topologies(int n, Units units, Units upsilon, int limit = kDefaultEnumerationLimit);

long long double_factorial(int k);

}  // namespace phylo
