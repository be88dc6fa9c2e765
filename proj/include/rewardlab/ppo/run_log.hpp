#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/envs/types.hpp"
#include "rewardlab/errors.hpp"
#include "rewardlab/ppo/config.hpp"

namespace rewardlab::ppo {

inline constexpr int kEpisodeSchemaVersion = 1;

struct EpisodeRecord {
  double raw_return = 0.0;
  double shaped_return = 0.0;     // raw + program shaping
  double intrinsic_return = 0.0;  // sum of c * rnd bonus
  bool success = false;
  int steps = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

struct TrainRunLog {
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::uint64_t seed = 0;
  TrainConfig config;
  std::vector<EpisodeRecord> episodes;
  double wall_seconds = 0.0;
  long total_steps = 0;
  long advisories = 0;
};

struct ProbeMetrics {
  double success_rate = 0.0;
  double mean_reward = 0.0;
  int episodes = 0;
  std::vector<double> sr_history;

  bool operator==(const ProbeMetrics&) const = default;
};

// Learning-curve smoothing window: 100 episodes on grids, 50 otherwise.
inline int smoothing_window(envs::EnvId id) { return envs::is_grid(id) ? 100 : 50; }

// Trailing mean; entry i averages the last min(window, i + 1) values.
inline std::vector<double> trailing_mean(const std::vector<double>& xs, int window) {
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= static_cast<std::size_t>(window)) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, window));
  }
  return out;
}

inline ProbeMetrics evaluate_final(const std::vector<EpisodeRecord>& episodes, int window = 100,
                                   int history_window = 100) {
  require(!episodes.empty(), "evaluate_final needs at least one episode");
  require(window > 0, "window must be positive");
  ProbeMetrics m;
  const std::size_t n = std::min<std::size_t>(window, episodes.size());
  const std::size_t first = episodes.size() - n;
  for (std::size_t i = first; i < episodes.size(); ++i) {
    m.success_rate += episodes[i].success ? 1.0 : 0.0;
    m.mean_reward += episodes[i].shaped_return;
  }
  m.success_rate /= static_cast<double>(n);
  m.mean_reward /= static_cast<double>(n);
  m.episodes = static_cast<int>(episodes.size());
  std::vector<double> successes;
  for (const auto& e : episodes) successes.push_back(e.success ? 1.0 : 0.0);
  m.sr_history = trailing_mean(successes, history_window);
  return m;
}

inline ProbeMetrics evaluate_final(const TrainRunLog& log, int window = 100) {
  return evaluate_final(log.episodes, window, smoothing_window(log.env));
}

inline nlohmann::json episode_json(const EpisodeRecord& e, std::size_t index) {
  return {{"schema", kEpisodeSchemaVersion},   {"episode", index},
          {"raw_return", e.raw_return},        {"shaped_return", e.shaped_return},
          {"intrinsic_return", e.intrinsic_return}, {"success", e.success},
          {"steps", e.steps}};
}

inline std::string to_jsonl(const std::vector<EpisodeRecord>& episodes) {
  std::string out;
  for (std::size_t i = 0; i < episodes.size(); ++i) out += episode_json(episodes[i], i).dump() + "\n";
  return out;
}

inline std::vector<EpisodeRecord> parse_jsonl(std::istream& in) {
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.at("schema").get<int>() != kEpisodeSchemaVersion)
      throw ConfigError("unsupported episode schema version " + j.at("schema").dump());
    EpisodeRecord e;
    e.raw_return = j.at("raw_return").get<double>();
    e.shaped_return = j.at("shaped_return").get<double>();
    e.intrinsic_return = j.value("intrinsic_return", 0.0);
    e.success = j.at("success").get<bool>();
    e.steps = j.at("steps").get<int>();
    out.push_back(e);
  }
  return out;
}

inline std::vector<EpisodeRecord> parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

inline void write_jsonl(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_jsonl(episodes);
}

inline std::vector<EpisodeRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return parse_jsonl(in);
}

inline nlohmann::json to_json(const ProbeMetrics& m) {
  return {{"success_rate", m.success_rate}, {"mean_reward", m.mean_reward}, {"episodes", m.episodes}};
}

}  // namespace rewardlab::ppo
