#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "rewardlab/diagnostics.hpp"
#include "rewardlab/envs/types.hpp"
#include "rewardlab/errors.hpp"
#include "rewardlab/ppo/run_log.hpp"

namespace rewardlab::generator {

enum class PromptMode { Generation, RefineFull, RefineStaticVocab, RefineMetricsOnly, RefineDense };

inline std::string_view to_string(PromptMode m) {
  switch (m) {
    case PromptMode::Generation: return "generation";
    case PromptMode::RefineFull: return "refine_full";
    case PromptMode::RefineStaticVocab: return "refine_static_vocab";
    case PromptMode::RefineMetricsOnly: return "refine_metrics_only";
    case PromptMode::RefineDense: return "refine_dense";
  }
  return "?";
}

inline PromptMode parse_prompt_mode(std::string_view s) {
  for (auto m : {PromptMode::Generation, PromptMode::RefineFull, PromptMode::RefineStaticVocab,
                 PromptMode::RefineMetricsOnly, PromptMode::RefineDense})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown prompt mode '" + std::string(s) + "'");
}

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  PromptMode mode = PromptMode::Generation;
};

inline constexpr std::string_view kSystemText = "You write reward programs in the rewardlab DSL.";

inline constexpr std::string_view kMetricsOnlySentence =
    "Note: the results are suboptimal; write an improved reward function.";

inline constexpr std::string_view kFailureModesBlock =
    "# COMMON FAILURE MODES TO AVOID\n"
    "1. Reward flooding: Do NOT add per-step bonuses.\n"
    "2. Action-index confusion: MiniGrid action 0=turn_left, 2=forward, NOT directions.\n"
    "3. Too-weak shaping: +0.1 may be too small. Use position-based progress tracking.\n";

namespace detail {

inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string signature_block(envs::EnvKind kind) {
  std::string s =
      "Write a program in the rewardlab reward DSL (an s-expression language):\n"
      "(program\n"
      "  (rule NAME\n"
      "    (when CONDITION)\n"
      "    EFFECT...)\n"
      "  ...)\n"
      "Rules run in order on every step. Effects: (add NUMBER-EXPR) adds to the shaped reward,\n"
      "(set-flag NAME) and (set-num NAME NUMBER-EXPR) update per-episode state, which is reset\n"
      "each episode. Read state with (flag NAME) and (num NAME); unset values are false and 0.\n"
      "Operators: contains = < > <= >= and or not + - * min max abs.\n"
      "The environment reward is always included; the program only adds shaping.\n"
      "Fields:\n";
  switch (kind) {
    case envs::EnvKind::Grid:
      s += "  action: integer (0=left, 1=right, 2=forward, 3=pickup, 4=drop, 5=toggle, 6=done)\n"
           "  event_text, carrying: text\n"
           "  agent_x, agent_y, step_count, max_steps, raw_reward: number\n"
           "  terminated, truncated: boolean\n";
      break;
    case envs::EnvKind::Reach:
      s += "  agent_x, agent_y, distance_to_target, step_count, max_steps, raw_reward: number\n"
           "  event_text: text\n"
           "  terminated, truncated: boolean\n"
           "The action is a continuous velocity command and is not readable.\n";
      break;
    case envs::EnvKind::Dense:
      s += "  agent_x, velocity, step_count, max_steps, raw_reward: number\n"
           "  event_text: text\n"
           "  terminated, truncated: boolean\n"
           "The action is a continuous force and is not readable.\n";
      break;
  }
  return s;
}

inline std::string principles_block(envs::EnvKind kind) {
  std::string s =
      "# DESIGN PRINCIPLES\n"
      "1. Start with the original reward.\n";
  switch (kind) {
    case envs::EnvKind::Grid:
      s += "2. Add one-time bonuses (+0.1 to +0.3) for subgoals.\n"
           "3. Use flags to ensure bonuses given only ONCE.\n"
           "4. Check event_text for events such as \"picked up\" and \"opened door\".\n";
      break;
    case envs::EnvKind::Reach:
      s += "2. Prefer distance-based progress bonuses over event-driven bonuses: reward reductions of\n"
           "   distance_to_target relative to the best distance so far.\n"
           "3. Use num state to remember progress so bonuses are given only ONCE per improvement.\n"
           "4. Check event_text for events.\n";
      break;
    case envs::EnvKind::Dense:
      s += "2. Reward forward progress (agent_x, velocity) rather than survival.\n"
           "3. Use flags and num state to avoid paying for the same progress twice.\n"
           "4. Check event_text for events.\n";
      break;
  }
  s += "5. Keep bonuses small vs goal reward (~1.0); every bonus magnitude between 0.01 and 0.5.\n"
       "6. Use only the listed fields and operators. Self-contained program.\n";
  return s;
}

inline std::string issue_line(const diagnostics::Trigger& t) {
  using diagnostics::Flag;
  std::string s = "- " + std::string(diagnostics::warning(t.flag)) + " (";
  bool first = true;
  for (const auto& [k, v] : t.values) {
    s += (first ? "" : ", ") + k + "=" + fixed(v);
    first = false;
  }
  s += "): ";
  switch (t.flag) {
    case Flag::RewardHacking: s += "shaped return is high but the task is rarely solved."; break;
    case Flag::ShapingWeak: s += "shaping is too small to guide the agent toward the goal."; break;
    case Flag::Plateau: s += "the success rate stopped improving during the probe."; break;
    case Flag::ReturnDeclining: s += "returns fell in the second half of the probe; shaping destabilizes learning."; break;
    case Flag::ReturnStagnated: s += "returns barely changed across the probe; shaping gives too little signal."; break;
  }
  return s + "\n";
}

inline bool is_dense_flag(diagnostics::Flag f) {
  return f == diagnostics::Flag::ReturnDeclining || f == diagnostics::Flag::ReturnStagnated;
}

}  // namespace detail

inline PromptBundle build_generation_prompt(const envs::EnvSpec& spec) {
  std::string u =
      "You are an expert reward function designer for RL.\n\n"
      "Given a description of an environment, write a reward shaping program that helps a PPO agent "
      "learn faster.\n\n"
      "# ENVIRONMENT\n" +
      spec.description_text + "\n\n# FUNCTION SIGNATURE\n" + detail::signature_block(spec.kind) + "\n" +
      detail::principles_block(spec.kind);
  return {std::string(kSystemText), std::move(u), PromptMode::Generation};
}

// trend is used by RefineDense only; it is recomputed from the probe when absent.
inline PromptBundle build_refinement_prompt(const envs::EnvSpec& spec, const std::string& previous_program,
                                            const ppo::ProbeMetrics& metrics, const diagnostics::Diagnosis& diagnosis,
                                            PromptMode mode,
                                            const std::optional<diagnostics::ReturnTrend>& trend = std::nullopt) {
  require(mode != PromptMode::Generation, "refinement prompt needs a refine mode");
  for (auto f : diagnosis.flags) {
    if (mode == PromptMode::RefineDense)
      require(detail::is_dense_flag(f), "dense refinement cannot report " + std::string(diagnostics::to_string(f)));
    else if (mode == PromptMode::RefineFull)
      require(!detail::is_dense_flag(f), "sparse refinement cannot report " + std::string(diagnostics::to_string(f)));
  }

  PromptBundle b = build_generation_prompt(spec);
  b.mode = mode;
  std::string& u = b.user_text;
  u += "\n# CURRENT REWARD FUNCTION\n" + previous_program;
  if (previous_program.empty() || previous_program.back() != '\n') u += "\n";

  u += "\n# TRAINING RESULTS\n- Episodes trained: " + std::to_string(metrics.episodes) + "\n";
  if (mode == PromptMode::RefineDense) {
    u += "- Mean return: " + detail::fixed(metrics.mean_reward) + "\n";
    if (trend) {
      u += "- Mean return, first half of probe: " + detail::fixed(trend->first_half_mean) + "\n";
      u += "- Mean return, second half of probe: " + detail::fixed(trend->second_half_mean) + "\n";
    }
    u += "\n# DIAGNOSED ISSUES\n";
    if (diagnosis.empty()) u += "- none\n";
    for (const auto& t : diagnosis.triggers) u += detail::issue_line(t);
    u += "\n# LOCOMOTION GUIDANCE\n"
         "1. Performance is the episode return; reward sustained forward velocity.\n"
         "2. Avoid large constant per-step terms; they swamp the environment reward.\n"
         "3. Prefer bonuses tied to new maximum agent_x over bonuses for staying alive.\n";
    return b;
  }

  u += "- Success rate: " + detail::fixed(metrics.success_rate) + "\n";
  u += "- Mean reward: " + detail::fixed(metrics.mean_reward) + "\n";
  switch (mode) {
    case PromptMode::RefineFull:
      u += "\n# DIAGNOSED ISSUES\n";
      if (diagnosis.empty()) u += "- none\n";
      for (const auto& t : diagnosis.triggers) u += detail::issue_line(t);
      u += "\n" + std::string(kFailureModesBlock);
      break;
    case PromptMode::RefineStaticVocab:
      u += "\n" + std::string(kFailureModesBlock);
      break;
    case PromptMode::RefineMetricsOnly:
      u += "\n" + std::string(kMetricsOnlySentence) + "\n";
      break;
    default: break;
  }
  return b;
}

// Appended to the prompt after a rejected attempt.
inline PromptBundle with_error_feedback(PromptBundle b, int attempt, const std::string& report_summary,
                                        const std::string& completion) {
  b.user_text += "\n# PREVIOUS ATTEMPT " + std::to_string(attempt) + " WAS REJECTED\n" + completion;
  if (completion.empty() || completion.back() != '\n') b.user_text += "\n";
  b.user_text += "Errors:\n" + report_summary;
  if (report_summary.empty() || report_summary.back() != '\n') b.user_text += "\n";
  b.user_text += "Fix these errors and return the complete program.\n";
  return b;
}

}  // namespace rewardlab::generator
