#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "rewardlab/errors.hpp"
#include "rewardlab/rng.hpp"

namespace rewardlab::analytics {

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kAlpha = 0.05;

inline double mean(const std::vector<double>& xs) {
  require(!xs.empty(), "mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// n - 1 denominator; 0 for a single value.
inline double sample_variance(const std::vector<double>& xs) {
  require(!xs.empty(), "variance of empty sample");
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double sample_std(const std::vector<double>& xs) { return std::sqrt(sample_variance(xs)); }

struct TestResult {
  double delta = 0.0;  // mean(a) - mean(b)
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  double cohens_d = 0.0;
  int n_a = 0;
  int n_b = 0;
};

// Welch's unequal-variance t-test, two-sided.
inline TestResult welch_test(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() >= 2 && b.size() >= 2, "welch_test needs at least two values per sample");
  TestResult r;
  r.n_a = static_cast<int>(a.size());
  r.n_b = static_cast<int>(b.size());
  const double na = r.n_a, nb = r.n_b;
  const double va = std::max(sample_variance(a), kVarianceFloor);
  const double vb = std::max(sample_variance(b), kVarianceFloor);
  r.delta = mean(a) - mean(b);
  const double qa = va / na, qb = vb / nb;
  r.t = r.delta / std::sqrt(qa + qb);
  r.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = r.t == 0.0 ? 1.0 : std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
  r.cohens_d = r.delta / pooled;
  return r;
}

struct HolmResult {
  std::vector<double> adjusted;  // same order as the input
  std::vector<bool> reject;
};

// Holm step-down adjustment with running maximum.
inline HolmResult holm_bonferroni(const std::vector<double>& p, double alpha = kAlpha) {
  for (double v : p) require(v >= 0.0 && v <= 1.0, "p-values must lie in [0, 1]");
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t k) { return p[i] < p[k]; });
  HolmResult out{std::vector<double>(m), std::vector<bool>(m)};
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const std::size_t i = order[rank];
    running = std::max(running, std::min(1.0, static_cast<double>(m - rank) * p[i]));
    out.adjusted[i] = running;
  }
  for (std::size_t i = 0; i < m; ++i) out.reject[i] = out.adjusted[i] < alpha;
  return out;
}

struct BootstrapSpec {
  int resamples = 2000;
  std::uint64_t seed = 0;
  double level = 0.95;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  int resamples = 0;  // statistic values the interval was computed from
  int draws = 0;      // including redrawn resamples
};

// Linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

namespace detail {

// Draws resamples until `resamples` defined statistic values are collected or
// 10x resamples draws were made. Draw b uses its own RNG stream.
template <typename Draw>
Interval percentile_interval(const BootstrapSpec& spec, Draw&& draw) {
  require(spec.resamples > 0 && spec.level > 0.0 && spec.level < 1.0, "bad bootstrap spec");
  std::vector<double> stats;
  stats.reserve(spec.resamples);
  const long cap = 10L * spec.resamples;
  long draws = 0;
  while (static_cast<int>(stats.size()) < spec.resamples && draws < cap) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(draws)));
    ++draws;
    if (const std::optional<double> s = draw(rng); s && std::isfinite(*s)) stats.push_back(*s);
  }
  if (stats.empty()) throw ContractViolation("bootstrap statistic undefined on every resample");
  const double tail = (1.0 - spec.level) / 2.0;
  return {quantile(stats, tail), quantile(stats, 1.0 - tail), static_cast<int>(stats.size()),
          static_cast<int>(draws)};
}

}  // namespace detail

using SampleStatistic = std::function<std::optional<double>(const std::vector<double>&)>;

// Percentile interval for a statistic of one sample, resampling with replacement.
inline Interval bootstrap_ci(const std::vector<double>& data, const SampleStatistic& statistic,
                             const BootstrapSpec& spec = {}) {
  require(!data.empty(), "bootstrap needs data");
  std::vector<double> resample(data.size());
  return detail::percentile_interval(spec, [&](Rng& rng) {
    for (auto& x : resample) x = data[rng.index(data.size())];
    return statistic(resample);
  });
}

inline Interval bootstrap_mean_ci(const std::vector<double>& data, const BootstrapSpec& spec = {}) {
  return bootstrap_ci(data, [](const std::vector<double>& xs) -> std::optional<double> { return mean(xs); }, spec);
}

}  // namespace rewardlab::analytics
