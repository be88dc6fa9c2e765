#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/dsl/interpreter.hpp"
#include "rewardlab/dsl/parser.hpp"
#include "rewardlab/dsl/printer.hpp"

namespace rewardlab::dsl {

inline constexpr int kBatteryVersion = 1;
inline constexpr double kMinBonus = 0.01;
inline constexpr double kMaxBonus = 0.5;

struct BatteryEntry {
  std::string name;
  Transition transition;
};

// Fixed dry-run transitions. Changing them requires bumping kBatteryVersion.
inline const std::vector<BatteryEntry>& dry_run_battery() {
  static const std::vector<BatteryEntry> battery = [] {
    using envs::EnvKind;
    auto grid = [](int action, int step, std::string event, std::string carrying) {
      Transition t;
      t.kind = EnvKind::Grid;
      t.action = action;
      t.info.agent_pos = {2, 2};
      t.info.carrying = std::move(carrying);
      t.info.event_text = std::move(event);
      t.info.step_count = step;
      t.info.max_steps = 640;
      return t;
    };
    std::vector<BatteryEntry> b;
    b.push_back({"episode_start", grid(0, 1, "", "nothing")});
    b.push_back({"key_pickup", grid(3, 12, "picked up yellow key", "yellow key")});
    b.push_back({"door_open", grid(5, 20, "opened door", "yellow key")});
    auto goal = grid(2, 40, "reached goal", "yellow key");
    goal.raw_reward = envs::success_reward(40, 640);
    goal.terminated = true;
    goal.info.agent_pos = {6, 6};
    goal.info.success = true;
    b.push_back({"goal", goal});
    auto trunc = grid(2, 640, "", "nothing");
    trunc.truncated = true;
    b.push_back({"truncation", trunc});

    Transition reach;
    reach.kind = EnvKind::Reach;
    reach.info.agent_pos = {0.1, -0.2};
    reach.info.event_text = "moved closer";
    reach.info.step_count = 5;
    reach.info.max_steps = 50;
    reach.info.distance_to_target = 0.3;
    b.push_back({"continuous_step", reach});

    Transition dense;
    dense.kind = EnvKind::Dense;
    dense.raw_reward = 1.45;
    dense.info.agent_pos = {3.0, 0.0};
    dense.info.step_count = 30;
    dense.info.max_steps = 200;
    dense.info.velocity = 0.5;
    b.push_back({"dense_step", dense});

    b.push_back({"no_event_step", grid(2, 7, "", "nothing")});
    return b;
  }();
  return battery;
}

struct ValidationError {
  Phase phase;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationError> errors;
  std::vector<std::string> advisories;
  std::optional<RewardProgram> program;

  void fail(Phase phase, std::string message) {
    ok = false;
    errors.push_back({phase, std::move(message)});
  }

  std::string summary() const {
    std::string out;
    for (const auto& e : errors) out += std::string(to_string(e.phase)) + ": " + e.message + "\n";
    return out;
  }
};

// Literal value of an add effect, including a negated literal.
inline std::optional<double> literal_value(const Expr& e) {
  if (e.kind == Expr::Kind::Number) return e.number;
  if (e.kind == Expr::Kind::Call && e.op == Op::Sub && e.args.size() == 1 && e.args[0].kind == Expr::Kind::Number)
    return -e.args[0].number;
  return std::nullopt;
}

// Env kinds whose interface covers every field the program reads.
inline std::vector<envs::EnvKind> compatible_kinds(const RewardProgram& program) {
  std::vector<envs::EnvKind> out;
  const auto fields = referenced_fields(program);
  for (auto kind : {envs::EnvKind::Grid, envs::EnvKind::Reach, envs::EnvKind::Dense}) {
    bool all = true;
    for (auto f : fields) all = all && field_available(f, kind);
    if (all) out.push_back(kind);
  }
  return out;
}

inline ValidationReport validate(const RewardProgram& program, std::optional<envs::EnvKind> kind = std::nullopt) {
  ValidationReport report;
  try {
    typecheck(program);
    if (kind) check_fields(program, *kind);
  } catch (const DslError& e) {
    report.fail(e.phase(), e.what());
    return report;
  }
  std::vector<envs::EnvKind> kinds;
  if (kind) {
    kinds.push_back(*kind);
  } else {
    kinds = compatible_kinds(program);
    if (kinds.empty()) {
      report.fail(Phase::Typecheck, "program mixes fields that no single environment exposes");
      return report;
    }
  }

  std::set<std::string> seen;
  for (auto k : kinds) {
    ShapingState state;
    for (const auto& entry : dry_run_battery()) {
      if (entry.transition.kind != k) continue;
      try {
        auto r = evaluate(program, entry.transition, state);
        if (!std::isfinite(r.shaped_reward))
          report.fail(Phase::DryRun, "non-finite reward on battery entry '" + entry.name + "'");
        for (auto& a : r.advisories)
          if (seen.insert(a).second) report.advisories.push_back(a);
        state = std::move(r.state);
      } catch (const DslError& e) {
        report.fail(Phase::DryRun, "battery entry '" + entry.name + "': " + e.message());
      }
    }
  }

  for (const auto& rule : program.rules)
    for (const auto& effect : rule.effects) {
      if (effect.kind != Effect::Kind::Add) continue;
      const auto v = literal_value(effect.value);
      if (v && (std::abs(*v) < kMinBonus || std::abs(*v) > kMaxBonus))
        report.advisories.push_back("rule '" + rule.name + "': bonus magnitude " + format_number(*v) +
                                    " outside [0.01, 0.5]");
    }
  if (report.ok) report.program = program;
  return report;
}

inline ValidationReport validate(std::string_view text, std::optional<envs::EnvKind> kind = std::nullopt) {
  RewardProgram program;
  try {
    program = parse(text);
  } catch (const DslError& e) {
    ValidationReport report;
    report.fail(e.phase(), e.what());
    return report;
  }
  return validate(program, kind);
}

}  // namespace rewardlab::dsl
