#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/dsl/validate.hpp"

namespace rewardlab::dsl {

enum class LintCategory { Flooding, ApiMisuse, WeakShaping };

inline std::string_view to_string(LintCategory c) {
  switch (c) {
    case LintCategory::Flooding: return "FLOODING";
    case LintCategory::ApiMisuse: return "API_MISUSE";
    case LintCategory::WeakShaping: return "WEAK_SHAPING";
  }
  return "?";
}

struct LintFinding {
  LintCategory category;
  std::string rule_name;
  std::string message;
};

struct LintReport {
  std::vector<LintFinding> findings;

  bool has(LintCategory c) const {
    for (const auto& f : findings)
      if (f.category == c) return true;
    return false;
  }
  bool clean() const { return findings.empty(); }
};

inline constexpr int kFloodTraceLength = 64;
inline constexpr double kWeakBonus = 0.05;

namespace detail {

inline bool references(const Expr& e, std::initializer_list<Field> fields) {
  bool hit = false;
  visit_exprs(e, [&](const Expr& x) {
    if (x.kind != Expr::Kind::Field) return;
    for (auto f : fields) hit = hit || x.field == f;
  });
  return hit;
}

// A one-time gate: the condition requires (not (flag k)) and the rule itself sets k.
inline bool has_one_time_gate(const Rule& rule) {
  bool hit = false;
  visit_exprs(rule.condition, [&](const Expr& x) {
    if (x.kind != Expr::Kind::Call || x.op != Op::Not || x.args[0].kind != Expr::Kind::Flag) return;
    for (const auto& effect : rule.effects)
      if (effect.kind == Effect::Kind::SetFlag && effect.key == x.args[0].text) hit = true;
  });
  return hit;
}

// Synthetic "always forward" trace: agent pinned in place, no events. On
// grids a second variant starts with a key pickup and then carries the key.
inline std::vector<Transition> forward_trace(envs::EnvKind kind, bool key_prefix) {
  std::vector<Transition> out;
  for (int i = 1; i <= kFloodTraceLength + (key_prefix ? 1 : 0); ++i) {
    Transition t;
    t.kind = kind;
    t.info.step_count = i;
    if (kind == envs::EnvKind::Grid) {
      t.action = envs::kForward;
      t.info.agent_pos = {2, 2};
      t.info.max_steps = 640;
      if (key_prefix) {
        t.info.carrying = "yellow key";
        if (i == 1) {
          t.action = envs::kPickup;
          t.info.event_text = "picked up yellow key";
        }
      }
    } else if (kind == envs::EnvKind::Reach) {
      t.info.agent_pos = {0.0, 0.0};
      t.info.max_steps = 50;
      t.info.distance_to_target = 0.5;
    } else {
      t.info.agent_pos = {5.0, 0.0};
      t.info.max_steps = 200;
      t.info.velocity = 1.0;
      t.raw_reward = 2.0;
    }
    out.push_back(std::move(t));
  }
  return out;
}

// True when the rule adds a positive amount on every uneventful step of a trace.
inline bool floods_trace(const RewardProgram& program, const Rule& rule, envs::EnvKind kind) {
  RewardProgram single;
  single.rules = {rule};
  for (bool key_prefix : {false, true}) {
    if (key_prefix && kind != envs::EnvKind::Grid) continue;
    ShapingState state;
    bool every = true;
    for (const auto& t : forward_trace(kind, key_prefix)) {
      // All rules update state; only this rule's adds are measured.
      const auto mine = evaluate(single, t, state);
      auto full = evaluate(program, t, state);
      state = std::move(full.state);
      if (!t.info.event_text.empty()) continue;
      if (!(mine.shaping > 0.0)) {
        every = false;
        break;
      }
    }
    if (every) return true;
  }
  return false;
}

inline void check_action_literals(const Rule& rule, const Expr& e, LintReport& report) {
  visit_exprs(e, [&](const Expr& x) {
    if (x.kind != Expr::Kind::Call) return;
    if (x.op != Op::Eq && x.op != Op::Lt && x.op != Op::Gt && x.op != Op::Le && x.op != Op::Ge) return;
    for (int side = 0; side < 2; ++side) {
      const Expr& f = x.args[side];
      const Expr& lit = x.args[1 - side];
      if (f.kind != Expr::Kind::Field || f.field != Field::Action || lit.kind != Expr::Kind::Number) continue;
      const double v = lit.number;
      if (v != std::floor(v) || v < 0 || v >= envs::kNumGridActions)
        report.findings.push_back({LintCategory::ApiMisuse, rule.name,
                                   "action compared with " + format_number(v) + ", valid indices are 0..6"});
    }
  });
}

}  // namespace detail

inline LintReport lint(const RewardProgram& program, std::optional<envs::EnvKind> kind = std::nullopt) {
  LintReport report;
  try {
    typecheck(program);
    if (kind) check_fields(program, *kind);
  } catch (const DslError& e) {
    report.findings.push_back({LintCategory::ApiMisuse, e.rule(), e.message()});
    return report;
  }
  std::vector<envs::EnvKind> kinds = kind ? std::vector<envs::EnvKind>{*kind} : compatible_kinds(program);
  if (kinds.empty()) {
    report.findings.push_back(
        {LintCategory::ApiMisuse, "", "program mixes fields that no single environment exposes"});
    return report;
  }

  for (const auto& rule : program.rules) detail::check_action_literals(rule, rule.condition, report);

  bool any_positive_literal = false;
  bool all_weak = true;
  std::vector<const Rule*> weak_rules;
  for (const auto& rule : program.rules) {
    bool adds = false;
    for (const auto& effect : rule.effects) {
      if (effect.kind != Effect::Kind::Add) continue;
      adds = true;
      const auto v = literal_value(effect.value);
      if (!v || *v <= 0.0) continue;
      any_positive_literal = true;
      if (*v >= kWeakBonus) all_weak = false;
    }
    if (!adds) continue;

    const bool gated = detail::has_one_time_gate(rule) ||
                       detail::references(rule.condition, {Field::EventText, Field::Terminated, Field::Truncated});
    if (!gated) {
      for (auto k : kinds) {
        if (detail::floods_trace(program, rule, k)) {
          report.findings.push_back(
              {LintCategory::Flooding, rule.name, "adds a positive bonus on every step of an uneventful trajectory"});
          break;
        }
      }
    }
    const bool progress_gated = detail::references(
        rule.condition, {Field::EventText, Field::Carrying, Field::AgentX, Field::AgentY, Field::DistanceToTarget});
    if (!progress_gated) weak_rules.push_back(&rule);
    else all_weak = false;
  }
  if (any_positive_literal && all_weak)
    for (const Rule* r : weak_rules)
      report.findings.push_back({LintCategory::WeakShaping, r->name,
                                 "bonus below " + format_number(kWeakBonus) + " with no event or position gate"});
  return report;
}

// Syntax errors propagate as DslError; typecheck failures become API_MISUSE.
inline LintReport lint(std::string_view text, std::optional<envs::EnvKind> kind = std::nullopt) {
  try {
    return lint(parse(text), kind);
  } catch (const DslError& e) {
    if (e.phase() != Phase::Typecheck) throw;
    LintReport report;
    report.findings.push_back({LintCategory::ApiMisuse, e.rule(), e.message()});
    return report;
  }
}

}  // namespace rewardlab::dsl
