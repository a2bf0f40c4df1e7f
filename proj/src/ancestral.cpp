#include "phylo/ancestral.hpp"

#include <cmath>
#include <stdexcept>

#include "phylo/model.hpp"
#include "phylo/rng.hpp"

namespace phylo {

AncestralEstimator::AncestralEstimator(const RootedShape& shape) : shape_(shape), labels_(shape.leaf_labels()) {
  size_t m = shape_.nodes.size();
  same_.assign(m, 1.0);
  diff_.assign(m, 0.0);
  for (size_t i = 1; i < m; ++i) {
    double delta = delta_from_weight(static_cast<double>(shape_.nodes[i].units) / shape_.upsilon, 2);
    same_[i] = 1 - delta;
    diff_[i] = delta;
  }
  work_.assign(2 * m, 0.0);
}

std::pair<double, double> AncestralEstimator::conditional(const std::uint8_t* pattern) const {
  const auto& nodes = shape_.nodes;
  size_t m = nodes.size();
  for (size_t i = 0; i < m; ++i) {
    int lab = nodes[i].label;
    work_[2 * i] = lab >= 0 ? (pattern[lab] == 0 ? 1.0 : 0.0) : 1.0;
    work_[2 * i + 1] = lab >= 0 ? (pattern[lab] == 1 ? 1.0 : 0.0) : 1.0;
  }
  // Parents precede children, so a reverse scan is a postorder.
  for (size_t i = m; i-- > 1;) {
    double a = work_[2 * i], b = work_[2 * i + 1];
    int p = nodes[i].parent;
    work_[2 * p] *= same_[i] * a + diff_[i] * b;
    work_[2 * p + 1] *= diff_[i] * a + same_[i] * b;
  }
  return {work_[0], work_[1]};
}

PosteriorPair AncestralEstimator::posterior(const std::uint8_t* pattern) const {
  auto [a, b] = conditional(pattern);
  double s = a + b;
  if (s <= 0) throw std::domain_error("pattern has zero probability under the subtree");
  return {a / s, b / s};
}

int mle_root_state(const PosteriorPair& p) { return p.p_plus - p.p_minus > kPosteriorTieTolerance ? 1 : -1; }

int AncestralEstimator::estimate(const std::uint8_t* pattern) const { return mle_root_state(posterior(pattern)); }

PosteriorPair ancestral_posterior(const RootedShape& shape, const std::uint8_t* pattern) {
  return AncestralEstimator(shape).posterior(pattern);
}

namespace {

int max_label(const RootedShape& s) {
  int m = -1;
  for (const auto& n : s.nodes) m = std::max(m, n.label);
  return m;
}

// Calls fn(pattern, P[pattern | +], P[pattern | -]) for every assignment of the shape's leaves.
template <typename Fn>
void for_each_pattern(const AncestralEstimator& est, Fn fn) {
  const auto& labels = est.labels();
  if (static_cast<int>(labels.size()) > kExactSubtreeLeafLimit) throw std::length_error("subtree too large to enumerate");
  std::vector<std::uint8_t> pattern(max_label(est.shape()) + 1, 0);
  for (std::uint64_t code = 0; code < (1ULL << labels.size()); ++code) {
    for (size_t i = 0; i < labels.size(); ++i) pattern[labels[i]] = (code >> i) & 1;
    auto [a, b] = est.conditional(pattern.data());
    fn(pattern.data(), a, b);
  }
}

double beta_of(double p) { return p <= 0.5 ? INFINITY : -std::log(2 * p - 1); }

}  // namespace

int sample_shape(const RootedShape& shape, std::uint64_t seed, std::vector<std::uint8_t>& pattern) {
  Rng rng(seed);
  pattern.assign(max_label(shape) + 1, 0);
  std::vector<std::uint8_t> state(shape.nodes.size());
  state[0] = rng.coin() ? 1 : 0;
  for (size_t i = 1; i < shape.nodes.size(); ++i) {
    double delta = delta_from_weight(static_cast<double>(shape.nodes[i].units) / shape.upsilon, 2);
    std::uint8_t parent = state[shape.nodes[i].parent];
    state[i] = rng.uniform() < delta ? 1 - parent : parent;
  }
  for (size_t i = 0; i < shape.nodes.size(); ++i)
    if (shape.nodes[i].label >= 0) pattern[shape.nodes[i].label] = state[i];
  return state[0] == 0 ? 1 : -1;
}

Accuracy reconstruction_accuracy(const RootedShape& shape, EvalMode mode, int trials, std::uint64_t seed) {
  AncestralEstimator est(shape);
  if (mode == EvalMode::exact) {
    double p = 0;
    for_each_pattern(est, [&](const std::uint8_t*, double a, double b) {
      int s = mle_root_state({a / (a + b), b / (a + b)});
      p += 0.5 * (s > 0 ? a : b);
    });
    return {p, beta_of(p), 0.0};
  }
  std::vector<std::uint8_t> pattern;
  long long hits = 0;
  for (int t = 0; t < trials; ++t) {
    int root = sample_shape(shape, derive_seed(seed, {static_cast<std::uint64_t>(t)}), pattern);
    hits += est.estimate(pattern.data()) == root;
  }
  double p = static_cast<double>(hits) / trials;
  return {p, beta_of(p), std::sqrt(p * (1 - p) / trials)};
}

std::pair<double, double> conditional_estimate_means(const RootedShape& shape) {
  AncestralEstimator est(shape);
  double plus = 0, minus = 0;
  for_each_pattern(est, [&](const std::uint8_t*, double a, double b) {
    int s = mle_root_state({a / (a + b), b / (a + b)});
    plus += a * s;
    minus += b * s;
  });
  return {plus, minus};
}

GapEstimate posterior_gap(const RootedShape& shape, EvalMode mode, int trials, std::uint64_t seed) {
  AncestralEstimator est(shape);
  if (mode == EvalMode::exact) {
    double g = 0;
    for_each_pattern(est, [&](const std::uint8_t*, double a, double b) { g += 0.5 * std::abs(a - b); });
    return {g, 0.0};
  }
  std::vector<std::uint8_t> pattern;
  double sum = 0, sum2 = 0;
  for (int t = 0; t < trials; ++t) {
    sample_shape(shape, derive_seed(seed, {static_cast<std::uint64_t>(t)}), pattern);
    auto p = est.posterior(pattern.data());
    double x = std::abs(p.p_plus - p.p_minus);
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / trials;
  double var = std::max(0.0, sum2 / trials - mean * mean);
  return {mean, std::sqrt(var / trials)};
}

std::vector<double> equal_split_flow(const RootedShape& shape) {
  std::vector<double> flow(shape.nodes.size(), 0.0);
  flow[0] = 1.0;
  for (size_t i = 0; i < shape.nodes.size(); ++i) {
    const auto& kids = shape.nodes[i].children;
    for (int c : kids) flow[c] = flow[i] / static_cast<double>(kids.size());
  }
  return flow;
}

double flow_bound(const RootedShape& shape, const std::optional<std::vector<double>>& given) {
  std::vector<double> flow = given ? *given : equal_split_flow(shape);
  const auto& nodes = shape.nodes;
  if (flow.size() != nodes.size()) throw NonUnitFlow("flow must have one entry per node");
  if (std::abs(flow[0] - 1.0) > 1e-9) throw NonUnitFlow("root outflow must be 1");
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) continue;
    double out = 0;
    for (int c : nodes[i].children) {
      if (flow[c] < -1e-12) throw NonUnitFlow("negative flow");
      out += flow[c];
    }
    if (std::abs(out - flow[i]) > 1e-9) throw NonUnitFlow("flow is not conserved");
  }
  std::vector<double> depth(nodes.size(), 0.0);
  double sum = 0;
  for (size_t i = 1; i < nodes.size(); ++i) {
    double w = static_cast<double>(nodes[i].units) / shape.upsilon;
    depth[i] = depth[nodes[i].parent] + w;
    double theta = std::exp(-w);
    double resistance = (1 - theta * theta) * std::exp(2 * depth[i]);
    sum += resistance * flow[i] * flow[i];
  }
  return 1.0 / (1.0 + sum);
}

}  // namespace phylo
