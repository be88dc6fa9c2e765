#pragma once

#include <string>

#include "rewardlab/envs/types.hpp"

namespace rewardlab::envs {

namespace detail {

inline constexpr const char* kDoorKeyDescription =
    "DoorKey-{N}x{N}: a square room surrounded by walls and split by a vertical wall. The agent starts "
    "in the left part together with a yellow key. A locked yellow door in the dividing wall leads to "
    "the right part, where a green goal square sits in the bottom-right corner. To succeed the agent "
    "must pick up the yellow key, face the door and toggle it to unlock and open it, walk through, and "
    "step onto the goal. The environment reward is 0 on every step and 1 - 0.9 * (step_count / "
    "max_steps) when the goal is reached; the episode ends at the goal or after {T} steps. The agent "
    "sees a 7x7 egocentric window. Events reported in event_text: \"picked up yellow key\", "
    "\"dropped yellow key\", \"opened door\", \"reached goal\". carrying is \"nothing\" or "
    "\"yellow key\". agent_x grows to the right, agent_y grows downward.";

inline constexpr const char* kLavaGapDescription =
    "LavaGap-S5: a 5x5 room with a vertical strip of lava cells that has a single gap. The agent starts "
    "in the top-left corner facing right; a green goal square is in the bottom-right corner. Stepping "
    "into lava ends the episode with reward 0. Reaching the goal ends the episode with reward 1 - 0.9 * "
    "(step_count / max_steps). Episodes are truncated after {T} steps. Events reported in event_text: "
    "\"stepped in lava\", \"reached goal\". agent_x grows to the right, agent_y grows downward.";

inline constexpr const char* kKeyCorridorDescription =
    "KeyCorridor-S3R1: a horizontal corridor with one side room above it and one below it. One side "
    "room is behind a closed (unlocked) door and contains a key; the other side room is behind a door "
    "locked with the key's color and contains a ball. The task is to fetch the key, unlock and open the "
    "locked door, drop the key if needed, and pick up the ball. Picking up the ball ends the episode "
    "with reward 1 - 0.9 * (step_count / max_steps); otherwise reward is 0 and the episode is truncated "
    "after {T} steps. Events reported in event_text: \"picked up <color> key\", \"picked up <color> "
    "ball\", \"dropped <color> key\", \"opened door\". carrying is \"nothing\" or \"<color> key\" / "
    "\"<color> ball\".";

inline constexpr const char* kPointReachDescription =
    "PointReach: a 2-D point mass inside the square [-1, 1] x [-1, 1] must move to a target location "
    "resampled every episode. Observation is a flat 4-vector (agent x, agent y, target x, target y); "
    "action is a 2-vector of velocity commands in [-1, 1], each step moves the agent by 0.1 * action. "
    "The task succeeds when distance_to_target < 0.05, which ends the episode with reward 1 - 0.9 * "
    "(step_count / max_steps); the environment reward is 0 otherwise and episodes are truncated after "
    "{T} steps. Events reported in event_text: \"reached target\", \"moved closer\". Position-based "
    "fields: agent_x, agent_y, distance_to_target.";

inline constexpr const char* kLineRunnerDescription =
    "LineRunner: a 1-D runner driven by a scalar force in [-1, 1]. Its velocity follows v <- v + 0.1 * "
    "(force - 0.5 * v) and its position x <- x + 0.1 * v. The environment reward is dense: forward "
    "velocity + alive bonus (1.0) - control cost (0.1 * force^2) on every step, so typical episode "
    "returns are in the hundreds. There is no binary success criterion; performance is the episode "
    "return. Episodes last {T} steps. Fields: agent_x (position), velocity, step_count, "
    "max_steps, raw_reward.";

inline std::string fill(std::string text, int grid_size, int max_steps) {
  auto replace_all = [&](const std::string& key, const std::string& value) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
      text.replace(pos, key.size(), value);
  };
  replace_all("{N}", std::to_string(grid_size));
  replace_all("{T}", std::to_string(max_steps));
  return text;
}

}  // namespace detail

inline EnvSpec env_spec(EnvId id) {
  using detail::fill;
  const ActionSpace grid_actions{true, kNumGridActions};
  switch (id) {
    case EnvId::DoorKey5:
      return {id, EnvKind::Grid, grid_actions, 250, true, kGridObsSize, fill(detail::kDoorKeyDescription, 5, 250)};
    case EnvId::DoorKey8:
      return {id, EnvKind::Grid, grid_actions, 640, true, kGridObsSize, fill(detail::kDoorKeyDescription, 8, 640)};
    case EnvId::LavaGapS5:
      return {id, EnvKind::Grid, grid_actions, 100, true, kGridObsSize, fill(detail::kLavaGapDescription, 5, 100)};
    case EnvId::KeyCorridorS3R1:
      return {id, EnvKind::Grid, grid_actions, 270, true, kGridObsSize,
              fill(detail::kKeyCorridorDescription, 7, 270)};
    case EnvId::PointReach:
      return {id, EnvKind::Reach, {false, 2}, 50, true, 4, fill(detail::kPointReachDescription, 0, 50)};
    case EnvId::LineRunner:
      return {id, EnvKind::Dense, {false, 1}, 200, false, 2, fill(detail::kLineRunnerDescription, 0, 200)};
  }
  throw ConfigError("unknown env id");
}

}  // namespace rewardlab::envs
