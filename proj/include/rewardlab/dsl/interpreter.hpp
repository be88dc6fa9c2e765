#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/dsl/ast.hpp"

namespace rewardlab::dsl {

inline constexpr double kSaturation = 1e9;

struct ShapingState {
  std::map<std::string, bool> flags;
  std::map<std::string, double> numbers;

  friend bool operator==(const ShapingState&, const ShapingState&) = default;
};

// One environment transition as seen by a reward program.
struct Transition {
  envs::EnvKind kind = envs::EnvKind::Grid;
  std::optional<int> action;  // discrete envs only
  double raw_reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  envs::InfoRecord info;
};

struct EvalOptions {
  bool clamp_shaping = false;  // clamp the per-step sum of adds to [-1, 1]
};

struct EvalResult {
  double shaped_reward = 0.0;
  double shaping = 0.0;  // shaped_reward - raw_reward
  ShapingState state;
  std::vector<std::string> fired_rules;
  std::vector<std::string> advisories;
};

namespace detail {

struct Value {
  ValueType type = ValueType::Number;
  double number = 0.0;
  bool boolean = false;
  std::string_view text;
};

inline bool contains_ci(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return true;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
  return it != hay.end();
}

class Evaluator {
 public:
  Evaluator(const Transition& t, const ShapingState& state, std::vector<std::string>& advisories,
            const std::string& rule)
      : t_(t), state_(state), advisories_(advisories), rule_(rule) {}

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Number: return num(e.number);
      case Expr::Kind::Boolean: return boolean(e.boolean);
      case Expr::Kind::Text: return text(e.text);
      case Expr::Kind::Field: return field(e);
      case Expr::Kind::Flag: {
        auto it = state_.flags.find(e.text);
        return boolean(it != state_.flags.end() && it->second);
      }
      case Expr::Kind::Num: {
        auto it = state_.numbers.find(e.text);
        return num(it == state_.numbers.end() ? 0.0 : it->second);
      }
      case Expr::Kind::Call: return call(e);
    }
    return num(0.0);
  }

  double saturate(double v) {
    if (std::isnan(v)) {
      advisories_.push_back("rule '" + rule_ + "': arithmetic produced NaN; replaced by 0");
      return 0.0;
    }
    if (std::abs(v) > kSaturation) {
      advisories_.push_back("rule '" + rule_ + "': arithmetic overflow saturated to +/-1e9");
      return std::copysign(kSaturation, v);
    }
    return v;
  }

 private:
  static Value num(double v) { return {ValueType::Number, v, false, {}}; }
  static Value boolean(bool b) { return {ValueType::Boolean, 0.0, b, {}}; }
  static Value text(std::string_view s) { return {ValueType::Text, 0.0, false, s}; }

  [[noreturn]] void missing(const Expr& e) const {
    const std::string name(field_info(e.field).name);
    throw DslError(Phase::Typecheck, "field '" + name + "' is not available in this environment", e.loc, name, rule_);
  }

  Value field(const Expr& e) {
    if (!field_available(e.field, t_.kind)) missing(e);
    const auto& info = t_.info;
    switch (e.field) {
      case Field::EventText: return text(info.event_text);
      case Field::Carrying: return text(info.carrying);
      case Field::AgentX: return num(info.agent_pos[0]);
      case Field::AgentY: return num(info.agent_pos[1]);
      case Field::StepCount: return num(info.step_count);
      case Field::MaxSteps: return num(info.max_steps);
      case Field::Action:
        if (!t_.action) missing(e);
        return num(*t_.action);
      case Field::RawReward: return num(t_.raw_reward);
      case Field::Terminated: return boolean(t_.terminated);
      case Field::Truncated: return boolean(t_.truncated);
      case Field::DistanceToTarget:
        if (!info.distance_to_target) missing(e);
        return num(*info.distance_to_target);
      case Field::Velocity:
        if (!info.velocity) missing(e);
        return num(*info.velocity);
    }
    missing(e);
  }

  Value call(const Expr& e) {
    const auto& a = e.args;
    switch (e.op) {
      case Op::Contains: return boolean(contains_ci(eval(a[0]).text, eval(a[1]).text));
      case Op::Eq: {
        const Value x = eval(a[0]);
        const Value y = eval(a[1]);
        if (x.type == ValueType::Number) return boolean(x.number == y.number);
        if (x.type == ValueType::Boolean) return boolean(x.boolean == y.boolean);
        return boolean(x.text == y.text);
      }
      case Op::Lt: return boolean(eval(a[0]).number < eval(a[1]).number);
      case Op::Gt: return boolean(eval(a[0]).number > eval(a[1]).number);
      case Op::Le: return boolean(eval(a[0]).number <= eval(a[1]).number);
      case Op::Ge: return boolean(eval(a[0]).number >= eval(a[1]).number);
      case Op::And:
        for (const auto& x : a)
          if (!eval(x).boolean) return boolean(false);
        return boolean(true);
      case Op::Or:
        for (const auto& x : a)
          if (eval(x).boolean) return boolean(true);
        return boolean(false);
      case Op::Not: return boolean(!eval(a[0]).boolean);
      case Op::Add: {
        double s = 0.0;
        for (const auto& x : a) s = saturate(s + eval(x).number);
        return num(s);
      }
      case Op::Sub:
        if (a.size() == 1) return num(-eval(a[0]).number);
        return num(saturate(eval(a[0]).number - eval(a[1]).number));
      case Op::Mul: {
        double p = 1.0;
        for (const auto& x : a) p = saturate(p * eval(x).number);
        return num(p);
      }
      case Op::Min: {
        double m = eval(a[0]).number;
        for (std::size_t i = 1; i < a.size(); ++i) m = std::min(m, eval(a[i]).number);
        return num(m);
      }
      case Op::Max: {
        double m = eval(a[0]).number;
        for (std::size_t i = 1; i < a.size(); ++i) m = std::max(m, eval(a[i]).number);
        return num(m);
      }
      case Op::Abs: return num(std::abs(eval(a[0]).number));
    }
    return num(0.0);
  }

  const Transition& t_;
  const ShapingState& state_;
  std::vector<std::string>& advisories_;
  const std::string& rule_;
};

}  // namespace detail

// Runs the rules in order. A rule sees the state left by earlier rules, and
// its effects apply in listed order. The input state is never modified.
inline EvalResult evaluate(const RewardProgram& program, const Transition& t, const ShapingState& state,
                           const EvalOptions& options = {}) {
  EvalResult out;
  out.state = state;
  double shaping = 0.0;
  for (const auto& rule : program.rules) {
    detail::Evaluator ev(t, out.state, out.advisories, rule.name);
    if (!ev.eval(rule.condition).boolean) continue;
    out.fired_rules.push_back(rule.name);
    for (const auto& effect : rule.effects) {
      switch (effect.kind) {
        case Effect::Kind::Add: shaping = ev.saturate(shaping + ev.eval(effect.value).number); break;
        case Effect::Kind::SetFlag: out.state.flags[effect.key] = true; break;
        case Effect::Kind::SetNum: {
          const double v = ev.eval(effect.value).number;
          out.state.numbers[effect.key] = v;
          break;
        }
      }
    }
  }
  if (options.clamp_shaping) shaping = std::clamp(shaping, -1.0, 1.0);
  out.shaping = shaping;
  out.shaped_reward = t.raw_reward + shaping;
  return out;
}

}  // namespace rewardlab::dsl
