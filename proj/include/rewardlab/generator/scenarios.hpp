#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/envs/types.hpp"
#include "rewardlab/errors.hpp"
#include "rewardlab/generator/client.hpp"

namespace rewardlab::generator {

// Fixture programs for the scripted scenarios, one set per environment family.
namespace programs {

inline constexpr const char* kGridFlooding = R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (contains event_text "key") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up))
  (rule door_bonus
    (when (and (contains event_text "opened door") (not (flag door_opened))))
    (add 0.25)
    (set-flag door_opened))
  (rule holding_key
    (when (and (flag key_picked_up) (not (flag door_opened)) (contains carrying "key")))
    (add 0.01))
  (rule survival_bonus
    (when (< step_count max_steps))
    (add 0.05)))
)";

inline constexpr const char* kGridFixed = R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (contains event_text "key") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up))
  (rule door_bonus
    (when (and (contains event_text "opened door") (not (flag door_opened))))
    (add 0.3)
    (set-flag door_opened))
  (rule count_stall
    (when (and (= agent_x (num last_x)) (= agent_y (num last_y))))
    (set-num stall (+ (num stall) 1)))
  (rule reset_stall
    (when (not (and (= agent_x (num last_x)) (= agent_y (num last_y)))))
    (set-num stall 0))
  (rule stagnation_penalty
    (when (and (> (num stall) 60) (< raw_reward 0.5)))
    (add -0.05))
  (rule remember_position
    (when true)
    (set-num last_x agent_x)
    (set-num last_y agent_y)))
)";

inline constexpr const char* kGridWeak = R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (not (flag key_picked_up))))
    (add 0.01)
    (set-flag key_picked_up)))
)";

inline constexpr const char* kGridGood = R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (contains event_text "key") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up))
  (rule door_bonus
    (when (and (contains event_text "opened door") (not (flag door_opened))))
    (add 0.3)
    (set-flag door_opened)))
)";

inline constexpr const char* kPointFlooding = R"((program
  (rule near_target
    (when (< distance_to_target 3))
    (add 0.05)))
)";

inline constexpr const char* kPointGood = R"((program
  (rule start
    (when (not (flag started)))
    (set-num best distance_to_target)
    (set-flag started))
  (rule progress
    (when (< distance_to_target (num best)))
    (add (min 0.5 (* 2 (- (num best) distance_to_target))))
    (set-num best distance_to_target)))
)";

inline constexpr const char* kPointWeak = R"((program
  (rule close
    (when (and (< distance_to_target 0.1) (not (flag close))))
    (add 0.01)
    (set-flag close)))
)";

inline constexpr const char* kLineFlooding = R"((program
  (rule alive_bonus
    (when (< step_count max_steps))
    (add 0.5)))
)";

inline constexpr const char* kLineGood = R"((program
  (rule new_max_x
    (when (> agent_x (num best_x)))
    (add (min 0.5 (- agent_x (num best_x))))
    (set-num best_x agent_x)))
)";

inline constexpr const char* kLineWeak = R"((program
  (rule moving
    (when (and (> velocity 1) (not (flag moving))))
    (add 0.01)
    (set-flag moving)))
)";

// Rejected at validation: unknown field, wrong-environment field, syntax, bad type.
inline constexpr std::array<const char*, 4> kInvalid = {
    "(program\n  (rule facing_door\n    (when (= agent_dir 0))\n    (add 0.1)))\n",
    "(program\n  (rule moving\n    (when (and (> velocity 0.5) (= action 2) (contains carrying \"key\")))\n"
    "    (add 0.1)))\n",
    "(program\n  (rule key_bonus\n    (when (contains event_text \"picked up\")\n    (add 0.2)))\n",
    "(program\n  (rule goal\n    (when (+ step_count 1))\n    (add 0.3)))\n",
};

}  // namespace programs

inline constexpr std::array<std::string_view, 5> kScenarioNames = {
    "flooding-then-fix", "api-misuse-retry", "weak-then-strong", "good-one-shot", "all-invalid"};

// Scenario variant for an environment family. Iterative scenarios hold enough
// programs for three refinements; all-invalid exhausts three generations.
inline ScriptedScenario scripted_scenario(std::string_view name, envs::EnvKind kind) {
  using namespace programs;
  const char* flood = kind == envs::EnvKind::Grid ? kGridFlooding
                      : kind == envs::EnvKind::Reach ? kPointFlooding
                                                     : kLineFlooding;
  const char* fixed = kind == envs::EnvKind::Grid ? kGridFixed : kind == envs::EnvKind::Reach ? kPointGood : kLineGood;
  const char* good = kind == envs::EnvKind::Grid ? kGridGood : kind == envs::EnvKind::Reach ? kPointGood : kLineGood;
  const char* weak = kind == envs::EnvKind::Grid ? kGridWeak : kind == envs::EnvKind::Reach ? kPointWeak : kLineWeak;
  // An invalid program for this family: a field the family does not expose.
  const char* misuse = kInvalid[0];

  ScriptedScenario s;
  s.name = std::string(name);
  if (name == "flooding-then-fix") s.programs = {flood, fixed, fixed, fixed};
  else if (name == "api-misuse-retry") s.programs = {misuse, good, good, good, good};
  else if (name == "weak-then-strong") s.programs = {weak, good, good, good};
  else if (name == "good-one-shot") s.programs = {good, good, good, good};
  else if (name == "all-invalid")
    for (int i = 0; i < 3; ++i) s.programs.insert(s.programs.end(), kInvalid.begin(), kInvalid.end());
  else throw ConfigError("unknown scripted scenario '" + std::string(name) + "'");
  return s;
}

inline ClientFactory scripted_factory(std::string_view name, envs::EnvKind kind) {
  ScriptedScenario s = scripted_scenario(name, kind);
  return [s] { return std::make_unique<ScriptedGenerator>(s); };
}

}  // namespace rewardlab::generator
