#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rewardlab/envs/environment.hpp"
#include "rewardlab/envs/specs.hpp"
#include "rewardlab/rng.hpp"

namespace rewardlab::envs {

namespace detail {

inline const std::vector<double>& continuous_action(const Action& action, int dim) {
  const auto* v = std::get_if<std::vector<double>>(&action);
  require(v != nullptr && static_cast<int>(v->size()) == dim,
          "continuous action must be a vector of dimension " + std::to_string(dim));
  for (double x : *v) require(std::isfinite(x) && x >= -1.0 && x <= 1.0, "continuous action outside [-1, 1]");
  return *v;
}

}  // namespace detail

// 2-D point mass; sparse success reward when within kSuccessRadius of the target.
class PointReach : public Environment {
 public:
  static constexpr double kSuccessRadius = 0.05;
  static constexpr double kStepScale = 0.1;

  PointReach() : spec_(env_spec(EnvId::PointReach)) {}
  const EnvSpec& spec() const override { return spec_; }

  std::pair<Observation, InfoRecord> reset(std::uint64_t seed) override {
    Rng rng(derive_seed(seed, 101));
    pos_ = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    do {
      target_ = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    } while (distance() < 4 * kSuccessRadius);
    step_count_ = 0;
    done_ = false;
    return {observe(), make_info("")};
  }

  StepResult step(const Action& action) override {
    require(!done_, "step called after the episode ended; call reset first");
    const auto& a = detail::continuous_action(action, 2);
    ++step_count_;
    const double before = distance();
    for (int i = 0; i < 2; ++i) pos_[i] = std::clamp(pos_[i] + kStepScale * a[i], -1.0, 1.0);
    const double after = distance();

    StepResult result;
    std::string event;
    if (after < kSuccessRadius) {
      result.terminated = true;
      result.raw_reward = success_reward(step_count_, spec_.max_steps);
      event = "reached target";
    } else if (after < before) {
      event = "moved closer";
    }
    if (!result.terminated && step_count_ >= spec_.max_steps) result.truncated = true;
    done_ = result.terminated || result.truncated;
    result.info = make_info(event);
    result.info.success = result.terminated;
    result.observation = observe();
    return result;
  }

  std::array<double, 2> target() const { return target_; }

 private:
  double distance() const { return std::hypot(pos_[0] - target_[0], pos_[1] - target_[1]); }

  Observation observe() const { return ContinuousObservation{{pos_[0], pos_[1], target_[0], target_[1]}}; }

  InfoRecord make_info(std::string event) const {
    InfoRecord info;
    info.agent_pos = pos_;
    info.carrying = "nothing";
    info.event_text = std::move(event);
    info.step_count = step_count_;
    info.max_steps = spec_.max_steps;
    info.distance_to_target = distance();
    return info;
  }

  EnvSpec spec_;
  std::array<double, 2> pos_{};
  std::array<double, 2> target_{};
  int step_count_ = 0;
  bool done_ = true;
};

// Dense-reward locomotion surrogate: a 1-D double integrator with drag.
// reward = forward velocity + alive bonus - control cost, every step.
class LineRunner : public Environment {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kDrag = 0.5;
  static constexpr double kAliveBonus = 1.0;
  static constexpr double kControlCost = 0.1;

  struct RewardComponents {
    double forward = 0.0;
    double alive = 0.0;
    double control = 0.0;
    double total() const { return forward + alive - control; }
  };

  LineRunner() : spec_(env_spec(EnvId::LineRunner)) {}
  const EnvSpec& spec() const override { return spec_; }

  std::pair<Observation, InfoRecord> reset(std::uint64_t /*seed*/) override {
    x_ = 0.0;
    v_ = 0.0;
    step_count_ = 0;
    done_ = false;
    last_ = {};
    return {observe(), make_info()};
  }

  StepResult step(const Action& action) override {
    require(!done_, "step called after the episode ended; call reset first");
    const double force = detail::continuous_action(action, 1)[0];
    ++step_count_;
    v_ += kDt * (force - kDrag * v_);
    x_ += kDt * v_;
    last_ = {v_, kAliveBonus, kControlCost * force * force};

    StepResult result;
    result.raw_reward = last_.total();
    result.truncated = step_count_ >= spec_.max_steps;
    done_ = result.truncated;
    result.info = make_info();
    result.observation = observe();
    return result;
  }

  const RewardComponents& last_components() const { return last_; }

 private:
  Observation observe() const { return ContinuousObservation{{x_, v_}}; }

  InfoRecord make_info() const {
    InfoRecord info;
    info.agent_pos = {x_, 0.0};
    info.carrying = "nothing";
    info.step_count = step_count_;
    info.max_steps = spec_.max_steps;
    info.velocity = v_;
    return info;
  }

  EnvSpec spec_;
  double x_ = 0.0;
  double v_ = 0.0;
  int step_count_ = 0;
  bool done_ = true;
  RewardComponents last_;
};

}  // namespace rewardlab::envs
