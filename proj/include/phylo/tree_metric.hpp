#pragma once

#include <array>
#include <vector>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Leaf-to-leaf distances in grid units plus edge counts.
class TreeMetric {
 public:
  TreeMetric(int n, Units upsilon);
  static TreeMetric from_units(int n, Units upsilon, std::vector<Units> units);

  int size() const { return n_; }
  Units upsilon() const { return upsilon_; }
  Units units(int a, int b) const { return units_[a * n_ + b]; }
  double distance(int a, int b) const { return static_cast<double>(units(a, b)) / upsilon_; }
  int graph(int a, int b) const { return graph_[a * n_ + b]; }
  void set(int a, int b, Units u, int g);
  const std::vector<Units>& raw_units() const { return units_; }

  bool operator==(const TreeMetric& o) const { return n_ == o.n_ && units_ == o.units_; }

 private:
  int n_;
  Units upsilon_;
  std::vector<Units> units_;
  std::vector<int> graph_;
};

TreeMetric tree_metric(const Phylogeny& t);

bool check_four_point(const TreeMetric& m);

enum class Split { ab_cd, ac_bd, ad_bc, degenerate };

struct QuartetTopology {
  std::array<int, 4> labels;
  Split split;
};

QuartetTopology quartet_topology(const TreeMetric& m, int a, int b, int c, int d);
// Same rule applied to an explicit 4x4 distance table.
Split quartet_split(const std::array<std::array<Units, 4>, 4>& d);

}  // namespace phylo
