#pragma once

#include "rewardlab/envs/types.hpp"

namespace rewardlab::orchestrator {

// Reference milestone programs for the HAND_CRAFTED condition.
inline const char* handcrafted_program(envs::EnvId id) {
  switch (id) {
    case envs::EnvId::DoorKey5:
    case envs::EnvId::DoorKey8:
      return R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (contains event_text "key") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up))
  (rule door_bonus
    (when (and (contains event_text "opened door") (not (flag door_opened))))
    (add 0.3)
    (set-flag door_opened)))
)";
    case envs::EnvId::LavaGapS5:
      return R"((program
  (rule crossed_gap
    (when (and (> agent_x 2) (not (flag crossed))))
    (add 0.3)
    (set-flag crossed)))
)";
    case envs::EnvId::KeyCorridorS3R1:
      return R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (contains event_text "key") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up))
  (rule door_bonus
    (when (and (contains event_text "opened door") (flag key_picked_up) (not (flag locked_door_opened))))
    (add 0.3)
    (set-flag locked_door_opened)))
)";
    case envs::EnvId::PointReach:
      return R"((program
  (rule halfway
    (when (and (< distance_to_target 0.5) (not (flag halfway))))
    (add 0.1)
    (set-flag halfway))
  (rule close
    (when (and (< distance_to_target 0.2) (not (flag close))))
    (add 0.2)
    (set-flag close))
  (rule very_close
    (when (and (< distance_to_target 0.1) (not (flag very_close))))
    (add 0.3)
    (set-flag very_close)))
)";
    case envs::EnvId::LineRunner:
      return R"((program
  (rule passed_5
    (when (and (> agent_x 5) (not (flag passed_5))))
    (add 0.1)
    (set-flag passed_5))
  (rule passed_10
    (when (and (> agent_x 10) (not (flag passed_10))))
    (add 0.2)
    (set-flag passed_10))
  (rule passed_20
    (when (and (> agent_x 20) (not (flag passed_20))))
    (add 0.3)
    (set-flag passed_20)))
)";
  }
  return "(program)\n";
}

}  // namespace rewardlab::orchestrator
