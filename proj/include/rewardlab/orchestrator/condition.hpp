#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "rewardlab/dsl/printer.hpp"
#include "rewardlab/errors.hpp"
#include "rewardlab/generator/prompts.hpp"

namespace rewardlab::orchestrator {

struct Condition {
  enum class Kind { NoShaping, OneShot, Iterative, HandCrafted, Rnd, BestOfN, NoShapingExtended, OneShotExtended };
  Kind kind = Kind::NoShaping;
  double rnd_coef = 0.1;  // Rnd
  int n = 3;              // BestOfN
  generator::PromptMode prompt_mode = generator::PromptMode::RefineFull;  // Iterative

  bool uses_generator() const {
    return kind == Kind::OneShot || kind == Kind::Iterative || kind == Kind::BestOfN || kind == Kind::OneShotExtended;
  }
  bool operator==(const Condition&) const = default;
};

inline std::string to_string(const Condition& c) {
  using K = Condition::Kind;
  switch (c.kind) {
    case K::NoShaping: return "NO_SHAPING";
    case K::OneShot: return "ONE_SHOT";
    case K::Iterative: return "ITERATIVE";
    case K::HandCrafted: return "HAND_CRAFTED";
    case K::Rnd: return "RND(" + dsl::format_number(c.rnd_coef) + ")";
    case K::BestOfN: return "BEST_OF_N(" + std::to_string(c.n) + ")";
    case K::NoShapingExtended: return "NO_SHAPING_EXTENDED";
    case K::OneShotExtended: return "ONE_SHOT_EXTENDED";
  }
  return "?";
}

// Accepts the names printed by to_string, e.g. "RND(0.1)", "BEST_OF_N(3)", "RND" (c = 0.1).
inline Condition parse_condition(std::string_view s) {
  using K = Condition::Kind;
  Condition c;
  std::string_view head = s, arg;
  if (const auto open = s.find('('); open != std::string_view::npos) {
    if (s.back() != ')') throw ConfigError("bad condition '" + std::string(s) + "'");
    head = s.substr(0, open);
    arg = s.substr(open + 1, s.size() - open - 2);
  }
  auto number = [&](auto& out) {
    if (arg.empty()) return;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), out);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw ConfigError("bad condition argument in '" + std::string(s) + "'");
  };
  if (head == "NO_SHAPING") c.kind = K::NoShaping;
  else if (head == "ONE_SHOT") c.kind = K::OneShot;
  else if (head == "ITERATIVE") c.kind = K::Iterative;
  else if (head == "HAND_CRAFTED") c.kind = K::HandCrafted;
  else if (head == "RND") c.kind = K::Rnd, number(c.rnd_coef);
  else if (head == "BEST_OF_N") c.kind = K::BestOfN, number(c.n);
  else if (head == "NO_SHAPING_EXTENDED") c.kind = K::NoShapingExtended;
  else if (head == "ONE_SHOT_EXTENDED") c.kind = K::OneShotExtended;
  else throw ConfigError("unknown condition '" + std::string(s) + "'");
  if (!arg.empty() && c.kind != K::Rnd && c.kind != K::BestOfN)
    throw ConfigError("condition '" + std::string(head) + "' takes no argument");
  if (c.kind == K::Rnd && !(c.rnd_coef >= 0.0)) throw ConfigError("RND coefficient must be >= 0");
  if (c.kind == K::BestOfN && c.n < 1) throw ConfigError("BEST_OF_N needs n >= 1");
  return c;
}

}  // namespace rewardlab::orchestrator
