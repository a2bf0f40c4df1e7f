#pragma once

#include <cstdint>
#include <vector>

#include "phylo/alignment.hpp"
#include "phylo/ancestral.hpp"
#include "phylo/battery.hpp"

namespace phylo {

struct UnvalidatedBattery : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Test subtrees at or below this size get exact conditional means.
inline constexpr int kExactMeanLeafLimit = 12;

struct Means {
  // Expected statistic per site under each tree.
  double ref_per_site = 0;
  double sharp_per_site = 0;
  double ref_std_error = 0;
  double sharp_std_error = 0;
  bool exact = true;
};

struct DistinguishingResult {
  double statistic;
  double ref_mean;
  double sharp_mean;
  double threshold;
  // True when the statistic exceeds the midpoint, which favors the reference tree.
  bool accept_reference;
};

struct ErrorRates {
  double ref_error;    // P_ref[statistic at or below the midpoint]
  double sharp_error;  // P_sharp[statistic above the midpoint]
  double ref_std_error;
  double sharp_std_error;
  int trials;
};

// Per-panel estimators built once from a validated battery.
class DistinguishingTest {
 public:
  // Throws UnvalidatedBattery unless validate_battery passes.
  explicit DistinguishingTest(Battery battery, int mc_trials = 100000, std::uint64_t seed = 1);

  const Battery& battery() const { return battery_; }
  const Means& means() const { return means_; }

  // Sum over panels and sites of alpha times the product of root estimates; the estimators of
  // either tree's subtrees may be used.
  double statistic(const Alignment& a, bool sharp_side = false) const;
  DistinguishingResult run(const Alignment& a) const;
  ErrorRates empirical_error(int k, int trials, std::uint64_t seed, int threads = 1) const;

 private:
  Battery battery_;
  std::vector<AncestralEstimator> y0_, z0_, y1_, z1_;
  Means means_;
};

// E[estimate | root = +1], E[estimate | root = -1] for a shape, exact up to the leaf limit.
struct ConditionalMeans {
  double plus;
  double minus;
  double std_error;
  bool exact;
};
ConditionalMeans estimate_conditional_means(const RootedShape& shape, int mc_trials, std::uint64_t seed);

// E[est_y est_z] for co-hanging subtrees whose roots are at distance d.
double pair_product_mean(const ConditionalMeans& y, const ConditionalMeans& z, double d);

double distinguishing_statistic(const Battery& b, const Alignment& a);
Means estimate_means(const Battery& b, int mc_trials = 100000, std::uint64_t seed = 1);
DistinguishingResult run_test(const Battery& b, const Alignment& a, const Means& m);
ErrorRates empirical_error(const Battery& b, int k, int trials, std::uint64_t seed, int threads = 1);

}  // namespace phylo
