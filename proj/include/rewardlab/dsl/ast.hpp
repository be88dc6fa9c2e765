#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/envs/types.hpp"

namespace rewardlab::dsl {

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;
inline constexpr std::size_t kMaxRules = 32;
inline constexpr int kMaxDepth = 16;

enum class ValueType { Number, Boolean, Text };

enum class Field {
  EventText, Carrying, AgentX, AgentY, StepCount, MaxSteps, Action,
  RawReward, Terminated, Truncated, DistanceToTarget, Velocity
};

struct FieldInfo {
  Field field;
  std::string_view name;
  ValueType type;
};

inline constexpr std::array<FieldInfo, 12> kFields = {{
    {Field::EventText, "event_text", ValueType::Text},
    {Field::Carrying, "carrying", ValueType::Text},
    {Field::AgentX, "agent_x", ValueType::Number},
    {Field::AgentY, "agent_y", ValueType::Number},
    {Field::StepCount, "step_count", ValueType::Number},
    {Field::MaxSteps, "max_steps", ValueType::Number},
    {Field::Action, "action", ValueType::Number},
    {Field::RawReward, "raw_reward", ValueType::Number},
    {Field::Terminated, "terminated", ValueType::Boolean},
    {Field::Truncated, "truncated", ValueType::Boolean},
    {Field::DistanceToTarget, "distance_to_target", ValueType::Number},
    {Field::Velocity, "velocity", ValueType::Number},
}};

inline const FieldInfo& field_info(Field f) { return kFields[static_cast<std::size_t>(f)]; }

inline std::optional<Field> lookup_field(std::string_view name) {
  for (const auto& info : kFields)
    if (info.name == name) return info.field;
  return std::nullopt;
}

// Fields each environment family exposes. Reading anything else is API misuse.
inline bool field_available(Field f, envs::EnvKind kind) {
  switch (f) {
    case Field::EventText:
    case Field::AgentX:
    case Field::StepCount:
    case Field::MaxSteps:
    case Field::RawReward:
    case Field::Terminated:
    case Field::Truncated: return true;
    case Field::Carrying:
    case Field::Action: return kind == envs::EnvKind::Grid;
    case Field::AgentY: return kind != envs::EnvKind::Dense;
    case Field::DistanceToTarget: return kind == envs::EnvKind::Reach;
    case Field::Velocity: return kind == envs::EnvKind::Dense;
  }
  return false;
}

enum class Op { Contains, Eq, Lt, Gt, Le, Ge, And, Or, Not, Add, Sub, Mul, Min, Max, Abs };

struct OpInfo {
  Op op;
  std::string_view name;
  int min_args;
  int max_args;  // -1 = unbounded
};

inline constexpr std::array<OpInfo, 15> kOps = {{
    {Op::Contains, "contains", 2, 2},
    {Op::Eq, "=", 2, 2},
    {Op::Lt, "<", 2, 2},
    {Op::Gt, ">", 2, 2},
    {Op::Le, "<=", 2, 2},
    {Op::Ge, ">=", 2, 2},
    {Op::And, "and", 2, -1},
    {Op::Or, "or", 2, -1},
    {Op::Not, "not", 1, 1},
    {Op::Add, "+", 2, -1},
    {Op::Sub, "-", 1, 2},
    {Op::Mul, "*", 2, -1},
    {Op::Min, "min", 2, -1},
    {Op::Max, "max", 2, -1},
    {Op::Abs, "abs", 1, 1},
}};

inline const OpInfo& op_info(Op op) { return kOps[static_cast<std::size_t>(op)]; }

inline std::optional<Op> lookup_op(std::string_view name) {
  for (const auto& info : kOps)
    if (info.name == name) return info.op;
  return std::nullopt;
}

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct Expr {
  enum class Kind { Number, Boolean, Text, Field, Flag, Num, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;  // string literal, or the state key for Flag/Num
  Field field = Field::EventText;
  Op op = Op::Add;
  std::vector<Expr> args;
  SourceLoc loc;

  static Expr make_number(double v) { Expr e; e.kind = Kind::Number; e.number = v; return e; }
  static Expr make_bool(bool v) { Expr e; e.kind = Kind::Boolean; e.boolean = v; return e; }
  static Expr make_text(std::string v) { Expr e; e.kind = Kind::Text; e.text = std::move(v); return e; }
  static Expr make_field(Field f) { Expr e; e.kind = Kind::Field; e.field = f; return e; }
  static Expr make_flag(std::string key) { Expr e; e.kind = Kind::Flag; e.text = std::move(key); return e; }
  static Expr make_num(std::string key) { Expr e; e.kind = Kind::Num; e.text = std::move(key); return e; }
  static Expr make_call(Op op, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.op = op;
    e.args = std::move(args);
    return e;
  }

  // Structural equality; source locations are ignored.
  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Number: return a.number == b.number;
      case Kind::Boolean: return a.boolean == b.boolean;
      case Kind::Text:
      case Kind::Flag:
      case Kind::Num: return a.text == b.text;
      case Kind::Field: return a.field == b.field;
      case Kind::Call: return a.op == b.op && a.args == b.args;
    }
    return false;
  }
};

struct Effect {
  enum class Kind { Add, SetFlag, SetNum };
  Kind kind = Kind::Add;
  std::string key;  // SetFlag / SetNum
  Expr value;       // Add / SetNum
  SourceLoc loc;

  friend bool operator==(const Effect& a, const Effect& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Add: return a.value == b.value;
      case Kind::SetFlag: return a.key == b.key;
      case Kind::SetNum: return a.key == b.key && a.value == b.value;
    }
    return false;
  }
};

struct Rule {
  std::string name;
  Expr condition;
  std::vector<Effect> effects;
  SourceLoc loc;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.name == b.name && a.condition == b.condition && a.effects == b.effects;
  }
};

struct RewardProgram {
  std::vector<Rule> rules;
  std::string source_text;

  // Two programs are equal when their ASTs are; formatting is irrelevant.
  friend bool operator==(const RewardProgram& a, const RewardProgram& b) { return a.rules == b.rules; }
};

enum class Phase { Parse, Typecheck, DryRun };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Parse: return "parse";
    case Phase::Typecheck: return "typecheck";
    case Phase::DryRun: return "dry_run";
  }
  return "?";
}

class DslError : public std::runtime_error {
 public:
  DslError(Phase phase, std::string message, SourceLoc loc = {}, std::string name = {}, std::string rule = {})
      : std::runtime_error(format(phase, message, loc)),
        phase_(phase),
        message_(std::move(message)),
        loc_(loc),
        name_(std::move(name)),
        rule_(std::move(rule)) {}

  Phase phase() const { return phase_; }
  const std::string& message() const { return message_; }
  SourceLoc loc() const { return loc_; }
  // Offending identifier, when there is one (e.g. an unknown field name).
  const std::string& name() const { return name_; }
  const std::string& rule() const { return rule_; }

 private:
  static std::string format(Phase phase, const std::string& message, SourceLoc loc) {
    std::string out(to_string(phase));
    if (loc.line > 0) out += " error at " + std::to_string(loc.line) + ":" + std::to_string(loc.column);
    else out += " error";
    return out + ": " + message;
  }

  Phase phase_;
  std::string message_;
  SourceLoc loc_;
  std::string name_;
  std::string rule_;
};

}  // namespace rewardlab::dsl
