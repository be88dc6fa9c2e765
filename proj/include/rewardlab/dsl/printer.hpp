#pragma once

#include <charconv>
#include <string>

#include "rewardlab/dsl/ast.hpp"

namespace rewardlab::dsl {

// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: return format_number(e.number);
    case Expr::Kind::Boolean: return e.boolean ? "true" : "false";
    case Expr::Kind::Text: return quote(e.text);
    case Expr::Kind::Field: return std::string(field_info(e.field).name);
    case Expr::Kind::Flag: return "(flag " + e.text + ")";
    case Expr::Kind::Num: return "(num " + e.text + ")";
    case Expr::Kind::Call: break;
  }
  std::string out = "(" + std::string(op_info(e.op).name);
  for (const auto& a : e.args) out += " " + print(a);
  return out + ")";
}

inline std::string print(const Effect& effect) {
  switch (effect.kind) {
    case Effect::Kind::Add: return "(add " + print(effect.value) + ")";
    case Effect::Kind::SetFlag: return "(set-flag " + effect.key + ")";
    case Effect::Kind::SetNum: return "(set-num " + effect.key + " " + print(effect.value) + ")";
  }
  return "";
}

// Canonical layout: one rule per block, when-clause and each effect on its own line.
inline std::string print(const RewardProgram& program) {
  if (program.rules.empty()) return "(program)\n";
  std::string out = "(program";
  for (const auto& rule : program.rules) {
    out += "\n  (rule " + rule.name;
    out += "\n    (when " + print(rule.condition) + ")";
    for (const auto& effect : rule.effects) out += "\n    " + print(effect);
    out += ")";
  }
  return out + ")\n";
}

}  // namespace rewardlab::dsl
