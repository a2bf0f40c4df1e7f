#include "phylo/ml.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "phylo/enumerate.hpp"

namespace phylo {

std::vector<Units> WeightGrid::values() const {
  if (f_units < 1 || g_units < f_units) throw std::invalid_argument("weight grid needs 1 <= f <= g");
  std::vector<Units> out;
  for (Units u = f_units; u <= g_units; ++u) out.push_back(u);
  return out;
}

bool scores_tied(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= kScoreTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

namespace {

class Tracker {
 public:
  void offer(const Phylogeny& t, const LogLikelihood& s) {
    ++scored_;
    if (!best_) {
      take(t, s);
      return;
    }
    if (scores_tied(s.value, best_score_.value)) {
      tie_ = true;
      auto key = canonical_form(t);
      if (key < best_key()) take(t, s, std::move(key), true);
      return;
    }
    if (s.value < best_score_.value) take(t, s);
  }

  MlResult result() const {
    if (!best_) throw std::invalid_argument("empty candidate set");
    return {*best_, best_score_, scored_, tie_};
  }

 private:
  const std::string& best_key() {
    if (!key_) key_ = canonical_form(*best_);
    return *key_;
  }
  void take(const Phylogeny& t, const LogLikelihood& s, std::optional<std::string> key = std::nullopt,
            bool keep_tie = false) {
    best_ = t;
    best_score_ = s;
    key_ = std::move(key);
    if (!keep_tie) tie_ = false;
  }

  std::optional<Phylogeny> best_;
  LogLikelihood best_score_;
  std::optional<std::string> key_;
  long long scored_ = 0;
  bool tie_ = false;
};

LogLikelihood score(const Phylogeny& t, const PatternCounts& data) { return log_likelihood(Pruner(t, data.r), data); }

Phylogeny with_all_units(const Phylogeny& t, const std::vector<Units>& units) {
  std::vector<Edge> edges(t.edges().begin(), t.edges().end());
  for (size_t e = 0; e < edges.size(); ++e) edges[e].units = units[e];
  std::vector<int> leaves(t.num_leaves());
  for (int a = 0; a < t.num_leaves(); ++a) leaves[a] = t.leaf_vertex(a);
  return Phylogeny::from_edges(t.num_vertices(), std::move(edges), std::move(leaves), t.upsilon(), t.root());
}

}  // namespace

Phylogeny optimize_branch_lengths(const Phylogeny& topology, const PatternCounts& data, const WeightGrid& grid,
                                  LogLikelihood* out_score) {
  auto values = grid.values();
  Units start = (grid.f_units + grid.g_units + 1) / 2;
  std::vector<Units> units(topology.num_edges(), start);
  Phylogeny current = with_all_units(topology, units);
  LogLikelihood best = score(current, data);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int e = 0; e < topology.num_edges(); ++e) {
      Units keep = units[e];
      for (Units v : values) {
        if (v == keep) continue;
        units[e] = v;
        auto cand = with_all_units(topology, units);
        auto s = score(cand, data);
        if (s.value < best.value && !scores_tied(s.value, best.value)) {
          best = s;
          keep = v;
          current = std::move(cand);
          improved = true;
        }
      }
      units[e] = keep;
    }
  }
  if (out_score) *out_score = best;
  return current;
}

MlResult ml_estimate(const Alignment& a, const MlSpace& space) {
  PatternCounts data = compress(a);
  Tracker tracker;
  int n = a.leaves();
  switch (space.mode) {
    case MlMode::candidates:
      if (space.candidates.empty()) throw std::invalid_argument("empty candidate set");
      for (const auto& t : space.candidates) {
        if (t.num_leaves() != n) throw std::invalid_argument("candidate leaf count differs from alignment");
        tracker.offer(t, score(t, data));
      }
      break;
    case MlMode::topology: {
      for (const auto& topo : all_topologies(n, space.grid.f_units, space.grid.upsilon, space.enumeration_limit)) {
        LogLikelihood s;
        auto t = optimize_branch_lengths(topo, data, space.grid, &s);
        tracker.offer(t, s);
      }
      break;
    }
    case MlMode::exhaustive: {
      auto values = space.grid.values();
      int edges = 2 * n - 3;
      double total = static_cast<double>(double_factorial(2 * n - 5)) * std::pow(static_cast<double>(values.size()), edges);
      if (n > space.enumeration_limit || total > static_cast<double>(space.max_candidates))
        throw std::length_error("exhaustive search space exceeds the candidate limit");
      for (const auto& topo : all_topologies(n, space.grid.f_units, space.grid.upsilon, space.enumeration_limit)) {
        std::vector<size_t> idx(edges, 0);
        std::vector<Units> units(edges, values[0]);
        while (true) {
          auto t = with_all_units(topo, units);
          tracker.offer(t, score(t, data));
          int e = 0;
          while (e < edges && ++idx[e] == values.size()) {
            idx[e] = 0;
            units[e] = values[0];
            ++e;
          }
          if (e == edges) break;
          units[e] = values[idx[e]];
        }
      }
      break;
    }
  }
  return tracker.result();
}

}  // namespace phylo
