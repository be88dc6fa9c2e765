#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rewardlab/envs/types.hpp"
#include "rewardlab/errors.hpp"

namespace rewardlab::ppo {

enum class ObsNorm { DivideBy10, RunningMeanStd };

inline std::string_view to_string(ObsNorm m) {
  return m == ObsNorm::DivideBy10 ? "divide_by_10" : "running_mean_std";
}

inline ObsNorm parse_obs_norm(std::string_view s) {
  if (s == "divide_by_10") return ObsNorm::DivideBy10;
  if (s == "running_mean_std") return ObsNorm::RunningMeanStd;
  throw ConfigError("unknown obs_norm_mode '" + std::string(s) + "'");
}

struct TrainConfig {
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_ratio = 0.2;
  double entropy_coef = 0.1;
  int ppo_epochs = 2;
  int batch_size = 64;
  int rollout_length = 512;
  int episodes = 3000;
  ObsNorm obs_norm_mode = ObsNorm::DivideBy10;
  double rnd_coef = 0.0;

  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int hidden_units = 128;
  bool clamp_shaping = false;
  double rnd_learning_rate = 1e-4;
  int max_advisories = 1000;

  void check() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(learning_rate, "learning_rate");
    positive(gamma, "gamma");
    positive(clip_ratio, "clip_ratio");
    positive(ppo_epochs, "ppo_epochs");
    positive(batch_size, "batch_size");
    positive(rollout_length, "rollout_length");
    positive(episodes, "episodes");
    positive(hidden_units, "hidden_units");
    if (gamma > 1.0 || gae_lambda < 0.0 || gae_lambda > 1.0) throw ConfigError("gamma/gae_lambda out of [0, 1]");
    if (entropy_coef < 0.0 || rnd_coef < 0.0) throw ConfigError("entropy_coef and rnd_coef must be >= 0");
  }
};

// Hyperparameter blocks: MiniGrid tasks and continuous tasks.
inline TrainConfig default_config(envs::EnvId id) {
  TrainConfig c;
  if (envs::is_grid(id)) return c;
  c.entropy_coef = 0.0;
  c.ppo_epochs = 10;
  c.rollout_length = 2048;
  c.obs_norm_mode = ObsNorm::RunningMeanStd;
  c.hidden_units = 256;
  c.episodes = 1000;
  return c;
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate},   {"gamma", c.gamma},
       {"gae_lambda", c.gae_lambda},         {"clip_ratio", c.clip_ratio},
       {"entropy_coef", c.entropy_coef},     {"ppo_epochs", c.ppo_epochs},
       {"batch_size", c.batch_size},         {"rollout_length", c.rollout_length},
       {"episodes", c.episodes},             {"obs_norm_mode", std::string(to_string(c.obs_norm_mode))},
       {"rnd_coef", c.rnd_coef},             {"value_coef", c.value_coef},
       {"max_grad_norm", c.max_grad_norm},   {"hidden_units", c.hidden_units},
       {"clamp_shaping", c.clamp_shaping},   {"rnd_learning_rate", c.rnd_learning_rate},
       {"max_advisories", c.max_advisories}};
}

// Missing keys keep the values already in c.
inline void apply_overrides(TrainConfig& c, const nlohmann::json& j) {
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("learning_rate", c.learning_rate);
  take("gamma", c.gamma);
  take("gae_lambda", c.gae_lambda);
  take("clip_ratio", c.clip_ratio);
  take("entropy_coef", c.entropy_coef);
  take("ppo_epochs", c.ppo_epochs);
  take("batch_size", c.batch_size);
  take("rollout_length", c.rollout_length);
  take("episodes", c.episodes);
  take("rnd_coef", c.rnd_coef);
  take("value_coef", c.value_coef);
  take("max_grad_norm", c.max_grad_norm);
  take("hidden_units", c.hidden_units);
  take("clamp_shaping", c.clamp_shaping);
  take("rnd_learning_rate", c.rnd_learning_rate);
  take("max_advisories", c.max_advisories);
  if (j.contains("obs_norm_mode")) c.obs_norm_mode = parse_obs_norm(j.at("obs_norm_mode").get<std::string>());
  c.check();
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) { apply_overrides(c, j); }

}  // namespace rewardlab::ppo
