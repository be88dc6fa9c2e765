#pragma once

#include <cmath>
#include <vector>

#include "rewardlab/errors.hpp"

namespace rewardlab::ppo {

// values has one more entry than rewards (the bootstrap value).
// dones[t] marks that the episode ended at step t, which cuts the recursion.
inline std::vector<double> gae_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                                          const std::vector<bool>& dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  require(values.size() == n + 1, "values must have one more entry than rewards");
  require(dones.empty() || dones.size() == n, "dones must match rewards in length");
  std::vector<double> adv(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = (!dones.empty() && dones[i]) ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * values[i + 1] * live - values[i];
    running = delta + gamma * lambda * live * running;
    adv[i] = running;
  }
  return adv;
}

inline std::vector<double> gae_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                                          double gamma, double lambda) {
  return gae_advantages(rewards, values, {}, gamma, lambda);
}

// Zero mean, unit variance (population std, 1e-8 floor).
inline void normalize_in_place(std::vector<double>& xs) {
  if (xs.empty()) return;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(xs.size()));
  for (double& x : xs) x = (x - mean) / (sd + 1e-8);
}

}  // namespace rewardlab::ppo
