#pragma once

#include <cstdint>
#include <utility>

#include "rewardlab/envs/types.hpp"

namespace rewardlab::envs {

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  // Same seed, same layout and initial state.
  virtual std::pair<Observation, InfoRecord> reset(std::uint64_t seed) = 0;

  // Throws ContractViolation on an out-of-range action or a step after the
  // episode ended.
  virtual StepResult step(const Action& action) = 0;
};

}  // namespace rewardlab::envs
