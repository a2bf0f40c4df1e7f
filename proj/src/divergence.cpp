#include "phylo/divergence.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phylo/likelihood.hpp"
#include "phylo/ml.hpp"
#include "phylo/parallel.hpp"
#include "phylo/rng.hpp"
#include "phylo/sampler.hpp"

namespace phylo {

namespace {

constexpr int kDivergenceLeafLimit = 14;

void require_same_leaves(const Phylogeny& p, const Phylogeny& q) {
  if (p.num_leaves() != q.num_leaves()) throw std::invalid_argument("trees have different leaf sets");
}

McEstimate summarize(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0, sum2 = 0;
  for (double x : xs) {
    sum += x;
    sum2 += x * x;
  }
  double n = static_cast<double>(xs.size());
  double mean = sum / n;
  double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

double neg_log_of(const Phylogeny& t, const PatternCounts& data) {
  return log_likelihood(Pruner(t, 2), data).value;
}

}  // namespace

double kl_divergence(const Phylogeny& p, const Phylogeny& q) {
  require_same_leaves(p, q);
  auto a = exact_leaf_distribution(p, 2, kDivergenceLeafLimit);
  auto b = exact_leaf_distribution(q, 2, kDivergenceLeafLimit);
  double kl = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0) kl += a[i] * std::log(a[i] / b[i]);
  return std::max(0.0, kl);
}

double tv_single_site(const Phylogeny& p, const Phylogeny& q) {
  require_same_leaves(p, q);
  auto a = exact_leaf_distribution(p, 2, kDivergenceLeafLimit);
  auto b = exact_leaf_distribution(q, 2, kDivergenceLeafLimit);
  double tv = 0;
  for (size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

McEstimate estimate_tv_k(const Phylogeny& p, const Phylogeny& q, int k, int trials, std::uint64_t seed, int threads) {
  require_same_leaves(p, q);
  std::vector<double> xs(std::max(0, trials));
  parallel_for(trials, threads, [&](int t) {
    auto data = compress(sample_markov(p, k, derive_seed(seed, {static_cast<std::uint64_t>(t)})));
    double log_ratio = neg_log_of(p, data) - neg_log_of(q, data);  // ln(q/p)
    xs[t] = log_ratio >= 0 ? 0.0 : -std::expm1(log_ratio);
  });
  return summarize(xs);
}

LrErrors lr_test_errors(const Phylogeny& null_tree, const Phylogeny& alt_tree, int k, int trials, std::uint64_t seed,
                        int threads) {
  require_same_leaves(null_tree, alt_tree);
  std::vector<double> type1(std::max(0, trials)), type2(std::max(0, trials));
  auto alt_wins = [&](const PatternCounts& data) {
    double l0 = neg_log_of(null_tree, data), l1 = neg_log_of(alt_tree, data);
    return l1 < l0 || scores_tied(l1, l0);
  };
  parallel_for(trials, threads, [&](int t) {
    auto id = static_cast<std::uint64_t>(t);
    type1[t] = alt_wins(compress(sample_markov(null_tree, k, derive_seed(seed, {id, 0})))) ? 1.0 : 0.0;
    type2[t] = alt_wins(compress(sample_markov(alt_tree, k, derive_seed(seed, {id, 1})))) ? 0.0 : 1.0;
  });
  return {summarize(type1), summarize(type2)};
}

}  // namespace phylo
