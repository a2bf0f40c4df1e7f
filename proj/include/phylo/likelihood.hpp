#pragma once

#include <cstdint>
#include <vector>

#include "phylo/alignment.hpp"
#include "phylo/phylogeny.hpp"

namespace phylo {

// Negative log-probability of the data; smaller is better.
struct LogLikelihood {
  double value = 0;
  // Set when some site probability fell below 1e-300; value is then +infinity.
  bool clamped = false;
};

// Pruning plan for one tree. Holds scratch space, so one instance per thread.
class Pruner {
 public:
  explicit Pruner(const Phylogeny& t, int r = 2);

  int leaves() const { return n_; }
  // -ln mu(pattern), with per-node rescaling against underflow.
  double neg_log(const std::uint8_t* pattern) const;
  double probability(const std::uint8_t* pattern) const;

 private:
  int n_;
  int r_;
  int root_;
  std::vector<int> postorder_;  // children before parents, root last
  std::vector<int> parent_;
  std::vector<int> leaf_label_;
  std::vector<double> same_;
  std::vector<double> diff_;
  mutable std::vector<double> work_;
};

// Distinct site patterns with multiplicities, in order of first appearance.
struct PatternCounts {
  int n = 0;
  int r = 2;
  std::vector<std::uint8_t> patterns;  // row-major, n per pattern
  std::vector<int> counts;

  int size() const { return static_cast<int>(counts.size()); }
  const std::uint8_t* pattern(int i) const { return patterns.data() + static_cast<size_t>(i) * n; }
};

PatternCounts compress(const Alignment& a);

double site_likelihood(const Phylogeny& t, const std::vector<int>& states, int r = 2);
LogLikelihood log_likelihood(const Phylogeny& t, const Alignment& a);
LogLikelihood log_likelihood(const Pruner& p, const PatternCounts& c);

inline constexpr int kExactLeafLimit = 16;

// Probability of every leaf pattern; index = sum over labels a of state_a * r^a.
std::vector<double> exact_leaf_distribution(const Phylogeny& t, int r = 2, int max_leaves = kExactLeafLimit);
std::vector<int> decode_pattern(std::uint64_t code, int n, int r);
std::uint64_t encode_pattern(const std::uint8_t* states, int n, int r);

// E[sigma_a sigma_b] = exp(-d(a, b)).
double two_point_correlation(const Phylogeny& t, int a, int b);

}  // namespace phylo
