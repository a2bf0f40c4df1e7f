#include "phylo/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "phylo/model.hpp"
#include "phylo/tree_metric.hpp"

namespace phylo {

Pruner::Pruner(const Phylogeny& t, int r) : n_(t.num_leaves()), r_(r) {
  RootedView view(t, t.effective_root());
  root_ = view.root;
  postorder_.assign(view.preorder.rbegin(), view.preorder.rend());
  parent_ = view.parent;
  leaf_label_.assign(t.num_vertices(), -1);
  for (int v = 0; v < t.num_vertices(); ++v) leaf_label_[v] = t.label_of(v);
  same_.assign(t.num_vertices(), 1.0);
  diff_.assign(t.num_vertices(), 0.0);
  for (int v = 0; v < t.num_vertices(); ++v) {
    if (view.parent[v] < 0) continue;
    auto ch = transition_matrix(t.weight(view.parent_edge[v]), r);
    same_[v] = ch.same();
    diff_[v] = ch.delta;
  }
  work_.assign(static_cast<size_t>(t.num_vertices()) * r, 0.0);
}

double Pruner::neg_log(const std::uint8_t* pattern) const {
  const int r = r_;
  for (int v : postorder_) {
    double* lv = &work_[static_cast<size_t>(v) * r];
    if (leaf_label_[v] >= 0) {
      for (int s = 0; s < r; ++s) lv[s] = 0;
      lv[pattern[leaf_label_[v]]] = 1;
    } else {
      for (int s = 0; s < r; ++s) lv[s] = 1;
    }
  }
  double log_scale = 0;
  for (int v : postorder_) {
    double* lv = &work_[static_cast<size_t>(v) * r];
    double m = 0;
    for (int s = 0; s < r; ++s) m = std::max(m, lv[s]);
    if (m == 0) return std::numeric_limits<double>::infinity();
    if (m < 1e-150) {
      for (int s = 0; s < r; ++s) lv[s] /= m;
      log_scale += std::log(m);
    }
    int p = parent_[v];
    if (p < 0) continue;
    double total = 0;
    for (int s = 0; s < r; ++s) total += lv[s];
    double* lp = &work_[static_cast<size_t>(p) * r];
    const double a = same_[v] - diff_[v];
    for (int s = 0; s < r; ++s) lp[s] *= diff_[v] * total + a * lv[s];
  }
  const double* lr = &work_[static_cast<size_t>(root_) * r];
  double prob = 0;
  for (int s = 0; s < r; ++s) prob += lr[s];
  prob /= r;
  double result = -(std::log(prob) + log_scale);
  // Probabilities below 1e-300 are reported as impossible.
  if (!(result < 690.7755)) return std::numeric_limits<double>::infinity();
  return result;
}

double Pruner::probability(const std::uint8_t* pattern) const { return std::exp(-neg_log(pattern)); }

PatternCounts compress(const Alignment& a) {
  PatternCounts c;
  c.n = a.leaves();
  c.r = a.states();
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < a.sites(); ++i) {
    std::string key(reinterpret_cast<const char*>(a.row(i)), a.leaves());
    auto [it, fresh] = index.emplace(std::move(key), c.size());
    if (fresh) {
      c.patterns.insert(c.patterns.end(), a.row(i), a.row(i) + a.leaves());
      c.counts.push_back(1);
    } else {
      ++c.counts[it->second];
    }
  }
  return c;
}

double site_likelihood(const Phylogeny& t, const std::vector<int>& states, int r) {
  if (static_cast<int>(states.size()) != t.num_leaves()) throw std::invalid_argument("pattern length must equal n");
  std::vector<std::uint8_t> p(states.begin(), states.end());
  for (int s : states)
    if (s < 0 || s >= r) throw std::invalid_argument("state out of range");
  return Pruner(t, r).probability(p.data());
}

LogLikelihood log_likelihood(const Pruner& p, const PatternCounts& c) {
  LogLikelihood out;
  for (int i = 0; i < c.size(); ++i) {
    double nl = p.neg_log(c.pattern(i));
    if (std::isinf(nl)) {
      out.clamped = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value += c.counts[i] * nl;
  }
  return out;
}

LogLikelihood log_likelihood(const Phylogeny& t, const Alignment& a) {
  if (a.leaves() != t.num_leaves()) throw std::invalid_argument("alignment width must equal n");
  return log_likelihood(Pruner(t, a.states()), compress(a));
}

std::vector<int> decode_pattern(std::uint64_t code, int n, int r) {
  std::vector<int> s(n);
  for (int a = 0; a < n; ++a) {
    s[a] = static_cast<int>(code % r);
    code /= r;
  }
  return s;
}

std::uint64_t encode_pattern(const std::uint8_t* states, int n, int r) {
  std::uint64_t code = 0;
  for (int a = n - 1; a >= 0; --a) code = code * r + states[a];
  return code;
}

std::vector<double> exact_leaf_distribution(const Phylogeny& t, int r, int max_leaves) {
  int n = t.num_leaves();
  double size = std::pow(static_cast<double>(r), n);
  if (n > max_leaves || size > std::pow(2.0, kExactLeafLimit)) throw std::length_error("pattern space too large");
  Pruner p(t, r);
  std::vector<double> out(static_cast<size_t>(size));
  std::vector<std::uint8_t> states(n);
  for (std::uint64_t code = 0; code < out.size(); ++code) {
    auto s = decode_pattern(code, n, r);
    for (int a = 0; a < n; ++a) states[a] = static_cast<std::uint8_t>(s[a]);
    out[code] = p.probability(states.data());
  }
  return out;
}

double two_point_correlation(const Phylogeny& t, int a, int b) {
  RootedView view(t, t.leaf_vertex(a));
  return std::exp(-static_cast<double>(view.dist[t.leaf_vertex(b)]) / t.upsilon());
}

}  // namespace phylo
