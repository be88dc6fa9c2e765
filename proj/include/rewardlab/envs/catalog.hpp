#pragma once

#include <memory>
#include <vector>

#include "rewardlab/envs/continuous.hpp"
#include "rewardlab/envs/grid_world.hpp"
#include "rewardlab/envs/specs.hpp"

namespace rewardlab::envs {

inline std::vector<EnvSpec> env_catalog() {
  std::vector<EnvSpec> out;
  for (auto id : kAllEnvIds) out.push_back(env_spec(id));
  return out;
}

inline std::unique_ptr<Environment> make_env(EnvId id) {
  switch (kind_of(id)) {
    case EnvKind::Grid: return std::make_unique<GridWorld>(id);
    case EnvKind::Reach: return std::make_unique<PointReach>();
    case EnvKind::Dense: return std::make_unique<LineRunner>();
  }
  throw ConfigError("unknown env id");
}

}  // namespace rewardlab::envs
