#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rewardlab/analytics/stats.hpp"
#include "rewardlab/envs/specs.hpp"
#include "rewardlab/orchestrator/run_record.hpp"
#include "rewardlab/ppo/run_log.hpp"

namespace rewardlab::analytics {

inline constexpr int kFinalWindow = 100;

// Success rate for tasks with a success signal, mean raw return otherwise.
inline bool uses_success_metric(envs::EnvId env) { return envs::env_spec(env).has_binary_success; }

inline double final_metric(envs::EnvId env, const std::vector<ppo::EpisodeRecord>& episodes, int window = kFinalWindow) {
  require(!episodes.empty(), "final_metric needs episodes");
  const std::size_t n = std::min<std::size_t>(window, episodes.size());
  double sum = 0.0;
  const bool success = uses_success_metric(env);
  for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i)
    sum += success ? (episodes[i].success ? 1.0 : 0.0) : episodes[i].raw_return;
  return sum / static_cast<double>(n);
}

// Per-episode curve for one run: success indicator or raw return, trailing-mean smoothed.
inline std::vector<double> learning_curve(envs::EnvId env, const std::vector<ppo::EpisodeRecord>& episodes) {
  std::vector<double> xs;
  xs.reserve(episodes.size());
  const bool success = uses_success_metric(env);
  for (const auto& e : episodes) xs.push_back(success ? (e.success ? 1.0 : 0.0) : e.raw_return);
  return ppo::trailing_mean(xs, ppo::smoothing_window(env));
}

struct BatchSummary {
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::string metric;  // "success_rate" or "return"
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;  // final metric per run with a final log
  int n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std; 0 when n == 1
  int skipped = 0;   // runs without a final training log
  // Across-run mean and sample std of the smoothed curves, truncated to the shortest run.
  std::vector<double> curve_mean;
  std::vector<double> curve_std;
};

inline BatchSummary summarize_batch(const std::vector<orchestrator::RunRecord>& records) {
  require(!records.empty(), "summarize_batch needs at least one record");
  BatchSummary s;
  s.env = records.front().env;
  s.metric = uses_success_metric(s.env) ? "success_rate" : "return";
  std::vector<std::vector<double>> curves;
  for (const auto& r : records) {
    require(r.env == s.env, "summarize_batch records must share one environment");
    if (!r.final_log || r.final_log->episodes.empty()) {
      ++s.skipped;
      continue;
    }
    s.seeds.push_back(r.seed);
    s.values.push_back(final_metric(r.env, r.final_log->episodes));
    curves.push_back(learning_curve(r.env, r.final_log->episodes));
  }
  s.n = static_cast<int>(s.values.size());
  if (s.n == 0) return s;
  s.mean = mean(s.values);
  s.std = sample_std(s.values);
  std::size_t len = curves.front().size();
  for (const auto& c : curves) len = std::min(len, c.size());
  s.curve_mean.resize(len);
  s.curve_std.resize(len);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t k = 0; k < curves.size(); ++k) column[k] = curves[k][t];
    s.curve_mean[t] = mean(column);
    s.curve_std[t] = sample_std(column);
  }
  return s;
}

}  // namespace rewardlab::analytics
