#include "phylo/swap.hpp"

#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace phylo {

std::vector<int> heap_positions(const Phylogeny& t) {
  if (!t.root()) throw std::invalid_argument("homogeneous tree needs a designated root");
  RootedView view(t, *t.root());
  std::vector<int> pos(t.num_vertices(), -1);
  pos[*t.root()] = 0;
  for (int v : view.preorder) {
    const auto& kids = view.children[v];
    if (kids.empty()) continue;
    if (kids.size() != 2) throw std::invalid_argument("tree is not complete binary");
    pos[kids[0]] = 2 * pos[v] + 1;
    pos[kids[1]] = 2 * pos[v] + 2;
  }
  return pos;
}

HomogeneousLayout homogeneous_layout(const Phylogeny& t) {
  HomogeneousLayout out;
  out.upsilon = t.upsilon();
  int n = t.num_leaves();
  int h = 0;
  while ((1 << h) < n) ++h;
  if ((1 << h) != n) throw std::invalid_argument("leaf count is not a power of two");
  out.h = h;
  if (n == 1) {
    out.labeling = {0};
    return out;
  }
  out.g_units = t.edge(0).units;
  for (const auto& e : t.edges())
    if (e.units != out.g_units) throw std::invalid_argument("weights are not all equal");
  auto pos = heap_positions(t);
  out.labeling.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    int p = pos[t.leaf_vertex(a)] - (n - 1);
    if (p < 0 || p >= n) throw std::invalid_argument("leaves are not all on the last level");
    out.labeling[p] = a;
  }
  return out;
}

namespace {

int level_of(int heap) {
  int d = 0;
  while (heap > 0) {
    heap = (heap - 1) / 2;
    ++d;
  }
  return d;
}

// Leaf positions [first, first + count) below heap index v.
std::pair<int, int> leaf_block(int v, int h) {
  int d = level_of(v);
  int first_on_level = (1 << d) - 1;
  int width = 1 << (h - d);
  return {(v - first_on_level) * width, width};
}

void apply_in_place(std::vector<int>& labeling, int h, SwapMove m) {
  auto [a, w] = leaf_block(m.u, h);
  auto [b, w2] = leaf_block(m.v, h);
  for (int i = 0; i < w; ++i) std::swap(labeling[a + i], labeling[b + i]);
  (void)w2;
}

void check_move(SwapMove m, int h) {
  int nodes = (1 << (h + 1)) - 1;
  if (m.u < 1 || m.v < 1 || m.u >= nodes || m.v >= nodes) throw std::invalid_argument("swap vertex out of range");
  if (level_of(m.u) != level_of(m.v)) throw std::invalid_argument("swap vertices are on different levels");
  if ((m.u - 1) / 2 == (m.v - 1) / 2) throw std::invalid_argument("swap vertices are siblings or equal");
}

// Labeling with every cherry and every internal pair ordered by minimum label.
std::vector<int> canonical_labeling(std::vector<int> lab) {
  int n = static_cast<int>(lab.size());
  for (int width = 1; width < n; width *= 2)
    for (int s = 0; s < n; s += 2 * width) {
      int left = *std::min_element(lab.begin() + s, lab.begin() + s + width);
      int right = *std::min_element(lab.begin() + s + width, lab.begin() + s + 2 * width);
      if (right < left) std::swap_ranges(lab.begin() + s, lab.begin() + s + width, lab.begin() + s + width);
    }
  return lab;
}

std::string pack(const std::vector<int>& lab) {
  std::string s;
  for (int x : lab) {
    s += static_cast<char>(x & 255);
    s += static_cast<char>(x >> 8);
  }
  return s;
}

std::string key_of(const std::vector<int>& lab) { return pack(canonical_labeling(lab)); }

}  // namespace

std::vector<SwapMove> legal_swaps(int h) {
  std::vector<SwapMove> out;
  for (int d = 1; d <= h; ++d) {
    int first = (1 << d) - 1, last = (1 << (d + 1)) - 1;
    for (int u = first; u < last; ++u)
      for (int v = u + 1; v < last; ++v)
        if ((u - 1) / 2 != (v - 1) / 2) out.push_back({u, v});
  }
  return out;
}

Phylogeny swap_apply(const Phylogeny& t, SwapMove move) {
  auto lay = homogeneous_layout(t);
  check_move(move, lay.h);
  apply_in_place(lay.labeling, lay.h, move);
  return build_homogeneous(lay.h, lay.g_units, lay.upsilon, lay.labeling);
}

std::string swap_class_key(const Phylogeny& t) { return key_of(homogeneous_layout(t).labeling); }

SwapNeighborhood swap_neighbors(const Phylogeny& t) {
  auto lay = homogeneous_layout(t);
  SwapNeighborhood out;
  std::set<std::string> seen{key_of(lay.labeling)};
  for (auto m : legal_swaps(lay.h)) {
    ++out.raw_moves;
    auto lab = lay.labeling;
    apply_in_place(lab, lay.h, m);
    if (seen.insert(key_of(lab)).second)
      out.neighbors.push_back(build_homogeneous(lay.h, lay.g_units, lay.upsilon, lab));
  }
  return out;
}

namespace {

// Distances from the class of `start` to every class found within `radius` (or to `target`).
int bfs(const HomogeneousLayout& start, const std::string* target, int radius, std::vector<long long>* ball) {
  auto moves = legal_swaps(start.h);
  std::unordered_map<std::string, int> dist;
  std::deque<std::vector<int>> queue;
  auto first = canonical_labeling(start.labeling);
  dist[pack(first)] = 0;
  queue.push_back(first);
  if (ball) ball->assign(radius + 1, 0);
  while (!queue.empty()) {
    auto lab = queue.front();
    queue.pop_front();
    std::string key = pack(lab);
    int d = dist[key];
    if (target && key == *target) return d;
    if (ball) ++(*ball)[d];
    if (d == radius) continue;
    for (auto m : moves) {
      auto next = lab;
      apply_in_place(next, start.h, m);
      next = canonical_labeling(next);
      std::string k = pack(next);
      if (dist.emplace(k, d + 1).second) queue.push_back(std::move(next));
    }
  }
  if (ball) {
    for (int d = 1; d <= radius; ++d) (*ball)[d] += (*ball)[d - 1];
  }
  return -1;
}

}  // namespace

int swap_distance_exact(const Phylogeny& a, const Phylogeny& b) {
  auto la = homogeneous_layout(a), lb = homogeneous_layout(b);
  if (la.h != lb.h || la.g_units != lb.g_units || la.upsilon != lb.upsilon)
    throw std::invalid_argument("swap distance needs matching h and weights");
  if (la.h > kSwapExactMaxLevels) throw std::length_error("exact swap distance is limited to h <= 3");
  auto target = key_of(lb.labeling);
  return bfs(la, &target, 1 << 30, nullptr);
}

std::vector<long long> swap_ball_sizes(const Phylogeny& t, int radius) {
  auto lay = homogeneous_layout(t);
  if (lay.h > kSwapExactMaxLevels) throw std::length_error("swap balls are limited to h <= 3");
  std::vector<long long> ball;
  bfs(lay, nullptr, radius, &ball);
  return ball;
}

}  // namespace phylo
