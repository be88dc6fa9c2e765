#pragma once

#include <string>

#include "rewardlab/dsl.hpp"
#include "rewardlab/rng.hpp"

namespace testing_support {

using namespace rewardlab::dsl;

inline std::string random_key(rewardlab::Rng& rng) {
  static const char* keys[] = {"k", "key_done", "door_done", "best_x", "n", "_tmp1"};
  return keys[rng.index(6)];
}

inline Expr random_expr(rewardlab::Rng& rng, ValueType type, int depth) {
  const bool leaf = depth >= 5 || rng.uniform() < 0.35;
  if (type == ValueType::Text) {
    if (rng.uniform() < 0.5) return Expr::make_field(rng.uniform() < 0.5 ? Field::EventText : Field::Carrying);
    static const char* texts[] = {"picked up", "opened door", "", "a \"quoted\" word", "back\\slash", "line\nbreak"};
    return Expr::make_text(texts[rng.index(6)]);
  }
  if (type == ValueType::Number) {
    if (leaf) {
      switch (rng.index(4)) {
        case 0: return Expr::make_number(rng.uniform(-2.0, 2.0));
        case 1: return Expr::make_number(static_cast<double>(rng.uniform_int(-3, 10)));
        case 2: return Expr::make_num(random_key(rng));
        default: {
          static const Field fields[] = {Field::AgentX, Field::AgentY, Field::StepCount,
                                         Field::MaxSteps, Field::Action, Field::RawReward};
          return Expr::make_field(fields[rng.index(6)]);
        }
      }
    }
    static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Min, Op::Max, Op::Abs};
    const Op op = ops[rng.index(6)];
    int n = 2;
    if (op == Op::Abs) n = 1;
    else if (op == Op::Sub) n = 1 + static_cast<int>(rng.index(2));
    else n = 2 + static_cast<int>(rng.index(2));
    std::vector<Expr> args;
    for (int i = 0; i < n; ++i) args.push_back(random_expr(rng, ValueType::Number, depth + 1));
    return Expr::make_call(op, std::move(args));
  }
  if (leaf) {
    switch (rng.index(4)) {
      case 0: return Expr::make_bool(rng.uniform() < 0.5);
      case 1: return Expr::make_flag(random_key(rng));
      case 2: return Expr::make_field(rng.uniform() < 0.5 ? Field::Terminated : Field::Truncated);
      default:
        return Expr::make_call(Op::Contains, {random_expr(rng, ValueType::Text, depth + 1),
                                              random_expr(rng, ValueType::Text, depth + 1)});
    }
  }
  switch (rng.index(5)) {
    case 0: {
      static const Op cmp[] = {Op::Eq, Op::Lt, Op::Gt, Op::Le, Op::Ge};
      return Expr::make_call(cmp[rng.index(5)], {random_expr(rng, ValueType::Number, depth + 1),
                                                 random_expr(rng, ValueType::Number, depth + 1)});
    }
    case 1: return Expr::make_call(Op::Not, {random_expr(rng, ValueType::Boolean, depth + 1)});
    case 2:
      return Expr::make_call(Op::Eq, {random_expr(rng, ValueType::Text, depth + 1),
                                      random_expr(rng, ValueType::Text, depth + 1)});
    default: {
      std::vector<Expr> args;
      const int n = 2 + static_cast<int>(rng.index(2));
      for (int i = 0; i < n; ++i) args.push_back(random_expr(rng, ValueType::Boolean, depth + 1));
      return Expr::make_call(rng.uniform() < 0.5 ? Op::And : Op::Or, std::move(args));
    }
  }
}

inline RewardProgram random_program(rewardlab::Rng& rng) {
  RewardProgram p;
  const int rules = static_cast<int>(rng.index(6));
  for (int i = 0; i < rules; ++i) {
    Rule r;
    r.name = "rule_" + std::to_string(i);
    r.condition = random_expr(rng, ValueType::Boolean, 0);
    const int effects = static_cast<int>(rng.index(4));
    for (int j = 0; j < effects; ++j) {
      Effect e;
      switch (rng.index(3)) {
        case 0:
          e.kind = Effect::Kind::Add;
          e.value = random_expr(rng, ValueType::Number, 1);
          break;
        case 1:
          e.kind = Effect::Kind::SetFlag;
          e.key = random_key(rng);
          break;
        default:
          e.kind = Effect::Kind::SetNum;
          e.key = random_key(rng);
          e.value = random_expr(rng, ValueType::Number, 1);
      }
      r.effects.push_back(std::move(e));
    }
    p.rules.push_back(std::move(r));
  }
  return p;
}

}  // namespace testing_support
