#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phylo/subtree.hpp"

namespace phylo {

struct PosteriorPair {
  double p_plus;
  double p_minus;
};

// Posteriors closer than this count as a tie, which resolves to -1.
inline constexpr double kPosteriorTieTolerance = 1e-12;

// Root-state inference on a rooted shape; patterns are indexed by leaf label.
class AncestralEstimator {
 public:
  explicit AncestralEstimator(const RootedShape& shape);

  PosteriorPair posterior(const std::uint8_t* pattern) const;
  int estimate(const std::uint8_t* pattern) const;
  // Unnormalized P[leaf pattern | root state]; index 0 is +1.
  std::pair<double, double> conditional(const std::uint8_t* pattern) const;

  const RootedShape& shape() const { return shape_; }
  const std::vector<int>& labels() const { return labels_; }

 private:
  RootedShape shape_;
  std::vector<int> labels_;
  std::vector<double> same_;
  std::vector<double> diff_;
  mutable std::vector<double> work_;
};

PosteriorPair ancestral_posterior(const RootedShape& shape, const std::uint8_t* pattern);
int mle_root_state(const PosteriorPair& p);

enum class EvalMode { exact, monte_carlo };

inline constexpr int kExactSubtreeLeafLimit = 16;

struct Accuracy {
  double probability;
  // P = (1 + e^{-beta}) / 2.
  double beta;
  double std_error;
};

Accuracy reconstruction_accuracy(const RootedShape& shape, EvalMode mode, int trials = 100000,
                                 std::uint64_t seed = 1);

// E[estimate | root = +1] and E[estimate | root = -1], by enumeration.
std::pair<double, double> conditional_estimate_means(const RootedShape& shape);

// Draws root state and leaf states of the shape; returns the root spin and fills pattern by label.
int sample_shape(const RootedShape& shape, std::uint64_t seed, std::vector<std::uint8_t>& pattern);

struct GapEstimate {
  double mean;
  double std_error;
};

// E|P+ - P-| exactly, or by simulation.
GapEstimate posterior_gap(const RootedShape& shape, EvalMode mode, int trials = 100000, std::uint64_t seed = 1);

struct NonUnitFlow : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// 1 / (1 + sum_e R(e) Psi(e)^2); flow[i] is the flow on the edge into node i.
double flow_bound(const RootedShape& shape, const std::optional<std::vector<double>>& flow = std::nullopt);
std::vector<double> equal_split_flow(const RootedShape& shape);

}  // namespace phylo
