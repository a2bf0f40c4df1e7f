#pragma once

#include <string>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Leaf names are the labels 1..n. A top-level node with two children marks a designated root.
Phylogeny parse_newick(const std::string& text, Units upsilon);
std::string to_newick(const Phylogeny& t);

// Digits after the decimal point that make units/upsilon round-trip.
int newick_precision(Units upsilon);

}  // namespace phylo
