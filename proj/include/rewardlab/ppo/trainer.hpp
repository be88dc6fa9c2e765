#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

#include "rewardlab/dsl/interpreter.hpp"
#include "rewardlab/envs/catalog.hpp"
#include "rewardlab/ppo/adam.hpp"
#include "rewardlab/ppo/config.hpp"
#include "rewardlab/ppo/gae.hpp"
#include "rewardlab/ppo/normalizer.hpp"
#include "rewardlab/ppo/policy.hpp"
#include "rewardlab/ppo/rnd.hpp"
#include "rewardlab/ppo/run_log.hpp"

namespace rewardlab::ppo {

// Seed streams drawn from the run seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kSampleStream = 2;
inline constexpr std::uint64_t kShuffleStream = 3;
inline constexpr std::uint64_t kRndStream = 4;
inline constexpr std::uint64_t kEpisodeStreamBase = 1000;

// Flushes denormal floats to zero on this thread while in scope. Shrinking
// gradients otherwise push optimizer moments into the slow subnormal range.
class DenormalGuard {
 public:
#if defined(__SSE__)
  DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~DenormalGuard() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

using EpisodeCallback = std::function<void(std::size_t index, const EpisodeRecord&)>;

class Trainer {
 public:
  using Matrix = Mlp<float>::Matrix;

  Trainer(envs::EnvId env_id, const dsl::RewardProgram* program, TrainConfig config, std::uint64_t seed)
      : env_(envs::make_env(env_id)),
        spec_(env_->spec()),
        program_(program),
        cfg_(config),
        seed_(seed),
        sample_rng_(derive_seed(seed, kSampleStream)),
        shuffle_rng_(derive_seed(seed, kShuffleStream)),
        obs_stats_(static_cast<std::size_t>(spec_.observation_size)) {
    cfg_.check();
    Rng init_rng(derive_seed(seed, kInitStream));
    model_ = ActorCritic<float>(spec_.observation_size, spec_.action_space.size, spec_.action_space.discrete,
                                cfg_.hidden_units, init_rng);
    actor_opt_ = Adam<float>(model_.actor.params().size(), cfg_.learning_rate);
    critic_opt_ = Adam<float>(model_.critic.params().size(), cfg_.learning_rate);
    log_std_opt_ = Adam<float>(model_.log_std.size(), cfg_.learning_rate);
    if (cfg_.rnd_coef > 0.0) rnd_.emplace(spec_.observation_size, derive_seed(seed, kRndStream), cfg_.rnd_learning_rate);
  }

  TrainRunLog run(const EpisodeCallback& on_episode = {}) {
    const DenormalGuard flush_denormals;
    const auto start = std::chrono::steady_clock::now();
    TrainRunLog log;
    log.env = spec_.id;
    log.seed = seed_;
    log.config = cfg_;

    begin_episode(0);
    std::size_t episode_index = 0;
    while (static_cast<int>(log.episodes.size()) < cfg_.episodes) {
      Rollout ro;
      bool finished = false;
      while (static_cast<int>(ro.rewards.size()) < cfg_.rollout_length) {
        const bool done = act(ro, log);
        if (!done) continue;
        log.episodes.push_back(current_);
        if (on_episode) on_episode(episode_index, current_);
        ++episode_index;
        if (static_cast<int>(log.episodes.size()) >= cfg_.episodes) {
          finished = true;
          break;
        }
        begin_episode(episode_index);
      }
      if (finished) break;
      update(ro);
    }
    log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
  }

  const ActorCritic<float>& model() const { return model_; }

 private:
  struct Rollout {
    std::vector<std::vector<float>> obs;
    std::vector<int> actions;
    std::vector<std::vector<float>> raw_actions;
    std::vector<double> logp;
    std::vector<double> values;
    std::vector<double> rewards;
    std::vector<bool> dones;
  };

  void begin_episode(std::size_t index) {
    auto [obs, info] = env_->reset(derive_seed(seed_, kEpisodeStreamBase + index));
    obs_ = std::move(obs);
    current_ = EpisodeRecord{};
    shaping_state_ = dsl::ShapingState{};
  }

  std::vector<float> features(const envs::Observation& obs) {
    std::vector<float> f = envs::to_features(obs);
    if (cfg_.obs_norm_mode == ObsNorm::DivideBy10) {
      for (float& x : f) x /= 10.0f;
      return f;
    }
    std::vector<double> d(f.begin(), f.end());
    obs_stats_.update(d);
    d = obs_stats_.normalize(d);
    return std::vector<float>(d.begin(), d.end());
  }

  static Matrix column(const std::vector<float>& v) {
    return Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(v.size()), 1);
  }

  // Takes one environment step; returns true when the episode ended.
  bool act(Rollout& ro, TrainRunLog& log) {
    std::vector<float> x = features(obs_);
    const Matrix xc = column(x);
    const Matrix out = model_.actor.forward(xc);
    const double value = static_cast<double>(model_.critic.forward(xc)(0, 0));

    envs::Action action;
    double logp = 0.0;
    if (model_.discrete) {
      const auto lsm = log_softmax(out.col(0));
      double u = sample_rng_.uniform();
      int a = static_cast<int>(lsm.size()) - 1;
      for (std::size_t k = 0; k < lsm.size(); ++k) {
        u -= std::exp(lsm[k]);
        if (u < 0.0) {
          a = static_cast<int>(k);
          break;
        }
      }
      logp = lsm[a];
      action = a;
      ro.actions.push_back(a);
    } else {
      std::vector<float> raw(model_.action_dim);
      std::vector<double> squashed(model_.action_dim);
      for (int k = 0; k < model_.action_dim; ++k) {
        const double sd = std::exp(static_cast<double>(model_.log_std[k]));
        raw[k] = static_cast<float>(static_cast<double>(out(k, 0)) + sd * sample_rng_.normal());
        squashed[k] = std::tanh(static_cast<double>(raw[k]));
      }
      const Matrix rc = column(raw);
      logp = gaussian_logp<float>(rc.col(0), out.col(0), model_.log_std);
      action = squashed;
      ro.raw_actions.push_back(std::move(raw));
    }

    const envs::StepResult step = env_->step(action);
    double shaped = step.raw_reward;
    if (program_ != nullptr) {
      dsl::Transition t;
      t.kind = spec_.kind;
      if (model_.discrete) t.action = std::get<int>(action);
      t.raw_reward = step.raw_reward;
      t.terminated = step.terminated;
      t.truncated = step.truncated;
      t.info = step.info;
      auto r = dsl::evaluate(*program_, t, shaping_state_, {cfg_.clamp_shaping});
      log.advisories += static_cast<long>(r.advisories.size());
      if (log.advisories > cfg_.max_advisories)
        throw TrainingAborted("reward program produced " + std::to_string(log.advisories) +
                              " runtime advisories; last: " + r.advisories.back());
      shaped = r.shaped_reward;
      shaping_state_ = std::move(r.state);
    }
    double intrinsic = 0.0;
    if (rnd_) intrinsic = cfg_.rnd_coef * rnd_->bonus(features_for_rnd(step.observation));

    const bool done = step.terminated || step.truncated;
    current_.raw_return += step.raw_reward;
    current_.shaped_return += shaped;
    current_.intrinsic_return += intrinsic;
    current_.steps += 1;
    if (done) current_.success = spec_.has_binary_success && step.info.success;
    ++log.total_steps;

    ro.obs.push_back(std::move(x));
    ro.logp.push_back(logp);
    ro.values.push_back(value);
    ro.rewards.push_back(shaped + intrinsic);
    ro.dones.push_back(done);
    obs_ = step.observation;
    return done;
  }

  std::vector<float> features_for_rnd(const envs::Observation& obs) const {
    std::vector<float> f = envs::to_features(obs);
    if (cfg_.obs_norm_mode == ObsNorm::DivideBy10) {
      for (float& x : f) x /= 10.0f;
      return f;
    }
    std::vector<double> d(f.begin(), f.end());
    d = obs_stats_.normalize(d);
    return std::vector<float>(d.begin(), d.end());
  }

  void update(const Rollout& ro) {
    if (rnd_) rnd_->update_normalization();
    const int n = static_cast<int>(ro.rewards.size());
    std::vector<double> values = ro.values;
    double bootstrap = 0.0;
    if (!ro.dones.back()) {
      std::vector<float> x = features_for_rnd(obs_);
      bootstrap = static_cast<double>(model_.critic.forward(column(x))(0, 0));
    }
    values.push_back(bootstrap);
    std::vector<double> adv = gae_advantages(ro.rewards, values, ro.dones, cfg_.gamma, cfg_.gae_lambda);
    std::vector<double> returns(n);
    for (int i = 0; i < n; ++i) returns[i] = adv[i] + ro.values[i];
    normalize_in_place(adv);

    const int obs_dim = spec_.observation_size;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const LossCoefs coefs{cfg_.clip_ratio, cfg_.entropy_coef, cfg_.value_coef};
    for (int epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
      shuffle_rng_.shuffle(order.begin(), order.end());
      for (int start = 0; start < n; start += cfg_.batch_size) {
        const int b = std::min(cfg_.batch_size, n - start);
        Batch<float> batch;
        batch.obs.resize(obs_dim, b);
        if (model_.discrete) batch.actions.resize(b);
        else batch.raw_actions.resize(model_.action_dim, b);
        batch.old_logp.resize(b);
        batch.advantages.resize(b);
        batch.returns.resize(b);
        for (int j = 0; j < b; ++j) {
          const int i = order[start + j];
          batch.obs.col(j) = column(ro.obs[i]);
          if (model_.discrete) batch.actions[j] = ro.actions[i];
          else batch.raw_actions.col(j) = column(ro.raw_actions[i]);
          batch.old_logp[j] = ro.logp[i];
          batch.advantages[j] = adv[i];
          batch.returns[j] = returns[i];
        }
        model_.zero_grad();
        const LossStats st = ppo_loss(model_, batch, coefs, true);
        if (!std::isfinite(st.total)) throw TrainingAborted("non-finite PPO loss");
        const double norm = model_.grad_norm();
        if (!std::isfinite(norm)) throw TrainingAborted("non-finite gradient");
        if (norm > cfg_.max_grad_norm) model_.scale_grads(static_cast<float>(cfg_.max_grad_norm / norm));
        actor_opt_.step(model_.actor.params(), model_.actor.grads());
        critic_opt_.step(model_.critic.params(), model_.critic.grads());
        if (!model_.discrete) log_std_opt_.step(model_.log_std, model_.log_std_grad);
      }
    }
  }

  std::unique_ptr<envs::Environment> env_;
  envs::EnvSpec spec_;
  const dsl::RewardProgram* program_;
  TrainConfig cfg_;
  std::uint64_t seed_;
  Rng sample_rng_;
  Rng shuffle_rng_;
  RunningMeanStd obs_stats_;
  ActorCritic<float> model_;
  Adam<float> actor_opt_;
  Adam<float> critic_opt_;
  Adam<float> log_std_opt_;
  std::optional<Rnd> rnd_;

  envs::Observation obs_;
  EpisodeRecord current_;
  dsl::ShapingState shaping_state_;
};

// Deterministic given (env, program, config, seed).
inline TrainRunLog train(envs::EnvId env, const dsl::RewardProgram* program, const TrainConfig& config,
                         std::uint64_t seed, const EpisodeCallback& on_episode = {}) {
  return Trainer(env, program, config, seed).run(on_episode);
}

}  // namespace rewardlab::ppo
