#include "phylo/tree_metric.hpp"

#include <algorithm>

namespace phylo {

TreeMetric::TreeMetric(int n, Units upsilon)
    : n_(n), upsilon_(upsilon), units_(static_cast<size_t>(n) * n, 0), graph_(static_cast<size_t>(n) * n, 0) {}

TreeMetric TreeMetric::from_units(int n, Units upsilon, std::vector<Units> units) {
  if (static_cast<int>(units.size()) != n * n) throw std::invalid_argument("metric size mismatch");
  TreeMetric m(n, upsilon);
  m.units_ = std::move(units);
  return m;
}

void TreeMetric::set(int a, int b, Units u, int g) {
  units_[a * n_ + b] = units_[b * n_ + a] = u;
  graph_[a * n_ + b] = graph_[b * n_ + a] = g;
}

TreeMetric tree_metric(const Phylogeny& t) {
  int n = t.num_leaves();
  TreeMetric m(n, t.upsilon());
  for (int a = 0; a < n; ++a) {
    RootedView view(t, t.leaf_vertex(a));
    for (int b = a + 1; b < n; ++b) {
      int v = t.leaf_vertex(b);
      m.set(a, b, view.dist[v], view.depth[v]);
    }
  }
  return m;
}

bool check_four_point(const TreeMetric& m) {
  int n = m.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          std::array<Units, 3> s{m.units(a, b) + m.units(c, d), m.units(a, c) + m.units(b, d),
                                 m.units(a, d) + m.units(b, c)};
          std::sort(s.begin(), s.end());
          if (s[1] != s[2]) return false;
        }
  return true;
}

Split quartet_split(const std::array<std::array<Units, 4>, 4>& d) {
  Units s0 = d[0][1] + d[2][3];
  Units s1 = d[0][2] + d[1][3];
  Units s2 = d[0][3] + d[1][2];
  if (s0 < s1 && s0 < s2) return Split::ab_cd;
  if (s1 < s0 && s1 < s2) return Split::ac_bd;
  if (s2 < s0 && s2 < s1) return Split::ad_bc;
  return Split::degenerate;
}

QuartetTopology quartet_topology(const TreeMetric& m, int a, int b, int c, int d) {
  std::array<int, 4> q{a, b, c, d};
  std::array<std::array<Units, 4>, 4> t{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[i][j] = m.units(q[i], q[j]);
  return {q, quartet_split(t)};
}

}  // namespace phylo
