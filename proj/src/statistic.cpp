#include "phylo/statistic.hpp"

#include <cmath>

#include "phylo/parallel.hpp"
#include "phylo/rng.hpp"
#include "phylo/sampler.hpp"

namespace phylo {

ConditionalMeans estimate_conditional_means(const RootedShape& shape, int mc_trials, std::uint64_t seed) {
  if (shape.num_leaves() <= kExactMeanLeafLimit) {
    auto [plus, minus] = conditional_estimate_means(shape);
    return {plus, minus, 0.0, true};
  }
  AncestralEstimator est(shape);
  std::vector<std::uint8_t> pattern;
  double sum[2] = {0, 0};
  long long count[2] = {0, 0};
  for (int t = 0; t < mc_trials; ++t) {
    int root = sample_shape(shape, derive_seed(seed, {static_cast<std::uint64_t>(t)}), pattern);
    int side = root > 0 ? 0 : 1;
    sum[side] += est.estimate(pattern.data());
    ++count[side];
  }
  double plus = count[0] ? sum[0] / count[0] : 0.0;
  double minus = count[1] ? sum[1] / count[1] : 0.0;
  auto se = [](double m, long long n) { return n > 0 ? std::sqrt(std::max(0.0, 1 - m * m) / n) : 1.0; };
  return {plus, minus, std::max(se(plus, count[0]), se(minus, count[1])), false};
}

double pair_product_mean(const ConditionalMeans& y, const ConditionalMeans& z, double d) {
  double theta = std::exp(-d);
  return 0.25 * ((y.plus + y.minus) * (z.plus + z.minus) + theta * (y.plus - y.minus) * (z.plus - z.minus));
}

DistinguishingTest::DistinguishingTest(Battery battery, int mc_trials, std::uint64_t seed)
    : battery_(std::move(battery)) {
  auto report = validate_battery(battery_);
  if (!report.ok) throw UnvalidatedBattery("battery fails validation: " + report.first_failure);
  double var0 = 0, var1 = 0;
  const double upsilon = static_cast<double>(battery_.t0->tree.upsilon());
  for (size_t i = 0; i < battery_.panels.size(); ++i) {
    const auto& p = battery_.panels[i];
    auto sy0 = shape_of(p.y0), sz0 = shape_of(p.z0), sy1 = shape_of(p.y_sharp), sz1 = shape_of(p.z_sharp);
    y0_.emplace_back(sy0);
    z0_.emplace_back(sz0);
    y1_.emplace_back(sy1);
    z1_.emplace_back(sz1);
    std::uint64_t ps = derive_seed(seed, {i});
    auto my0 = estimate_conditional_means(sy0, mc_trials, derive_seed(ps, {0}));
    auto mz0 = estimate_conditional_means(sz0, mc_trials, derive_seed(ps, {1}));
    auto my1 = estimate_conditional_means(sy1, mc_trials, derive_seed(ps, {2}));
    auto mz1 = estimate_conditional_means(sz1, mc_trials, derive_seed(ps, {3}));
    means_.ref_per_site += p.alpha * pair_product_mean(my0, mz0, p.d0 / upsilon);
    means_.sharp_per_site += p.alpha * pair_product_mean(my1, mz1, p.d_sharp / upsilon);
    var0 += my0.std_error * my0.std_error + mz0.std_error * mz0.std_error;
    var1 += my1.std_error * my1.std_error + mz1.std_error * mz1.std_error;
    means_.exact = means_.exact && my0.exact && mz0.exact && my1.exact && mz1.exact;
  }
  means_.ref_std_error = std::sqrt(var0);
  means_.sharp_std_error = std::sqrt(var1);
}

double DistinguishingTest::statistic(const Alignment& a, bool sharp_side) const {
  const auto& ys = sharp_side ? y1_ : y0_;
  const auto& zs = sharp_side ? z1_ : z0_;
  double total = 0;
  for (size_t i = 0; i < ys.size(); ++i) {
    long long s = 0;
    for (int j = 0; j < a.sites(); ++j) s += ys[i].estimate(a.row(j)) * zs[i].estimate(a.row(j));
    total += battery_.panels[i].alpha * static_cast<double>(s);
  }
  return total;
}

DistinguishingResult DistinguishingTest::run(const Alignment& a) const {
  double k = a.sites();
  double s = statistic(a);
  double m0 = means_.ref_per_site * k, m1 = means_.sharp_per_site * k;
  double threshold = (m0 + m1) / 2;
  return {s, m0, m1, threshold, s - threshold > 0};
}

ErrorRates DistinguishingTest::empirical_error(int k, int trials, std::uint64_t seed, int threads) const {
  std::vector<char> miss0(trials, 0), miss1(trials, 0);
  const Phylogeny& t0 = battery_.t0->tree;
  const Phylogeny& t1 = battery_.t_sharp->tree;
  parallel_for(trials, threads, [&](int t) {
    auto u = static_cast<std::uint64_t>(t);
    miss0[t] = !run(sample_markov(t0, k, derive_seed(seed, {u, 0}))).accept_reference;
    miss1[t] = run(sample_markov(t1, k, derive_seed(seed, {u, 1}))).accept_reference;
  });
  double e0 = 0, e1 = 0;
  for (int t = 0; t < trials; ++t) {
    e0 += miss0[t];
    e1 += miss1[t];
  }
  ErrorRates r{0, 0, 0, 0, trials};
  if (trials == 0) return r;
  r.ref_error = e0 / trials;
  r.sharp_error = e1 / trials;
  r.ref_std_error = std::sqrt(r.ref_error * (1 - r.ref_error) / trials);
  r.sharp_std_error = std::sqrt(r.sharp_error * (1 - r.sharp_error) / trials);
  return r;
}

double distinguishing_statistic(const Battery& b, const Alignment& a) { return DistinguishingTest(b, 1).statistic(a); }

Means estimate_means(const Battery& b, int mc_trials, std::uint64_t seed) {
  return DistinguishingTest(b, mc_trials, seed).means();
}

DistinguishingResult run_test(const Battery& b, const Alignment& a, const Means& m) {
  double k = a.sites();
  double s = distinguishing_statistic(b, a);
  double m0 = m.ref_per_site * k, m1 = m.sharp_per_site * k;
  double threshold = (m0 + m1) / 2;
  return {s, m0, m1, threshold, s - threshold > 0};
}

ErrorRates empirical_error(const Battery& b, int k, int trials, std::uint64_t seed, int threads) {
  return DistinguishingTest(b).empirical_error(k, trials, seed, threads);
}

}  // namespace phylo
