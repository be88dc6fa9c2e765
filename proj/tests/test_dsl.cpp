#include <gtest/gtest.h>

#include "rewardlab/dsl.hpp"
#include "rewardlab/rng.hpp"
#include "dsl_fuzz.hpp"

using namespace rewardlab;
using namespace rewardlab::dsl;

namespace {

const char* kKeyBonus = R"((program
  (rule key_bonus
    (when (and (contains event_text "picked up") (not (flag key_picked_up))))
    (add 0.2)
    (set-flag key_picked_up)))
)";

const char* kForwardFlood = R"((program
  (rule forward_bonus
    (when (= action 2))
    (add 0.02)))
)";

Transition grid_step(int action, std::string event = "", std::string carrying = "nothing") {
  Transition t;
  t.kind = envs::EnvKind::Grid;
  t.action = action;
  t.info.event_text = std::move(event);
  t.info.carrying = std::move(carrying);
  t.info.max_steps = 640;
  return t;
}

}  // namespace

TEST(Parse, KeyBonusProgram) {
  auto p = parse(kKeyBonus);
  ASSERT_EQ(p.rules.size(), 1u);
  const auto& cond = p.rules[0].condition;
  ASSERT_EQ(cond.kind, Expr::Kind::Call);
  EXPECT_EQ(cond.op, Op::And);
  const auto& contains = cond.args[0];
  EXPECT_EQ(contains.op, Op::Contains);
  EXPECT_EQ(contains.args[0].field, Field::EventText);
  EXPECT_EQ(contains.args[1].text, "picked up");
}

TEST(Parse, EmptyProgram) {
  auto p = parse("(program)");
  EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(validate("(program)").ok);
}

TEST(Parse, UnknownFieldIsTypecheckError) {
  try {
    parse("(program (rule r (when (> gripper_torque 1)) (add 0.1)))");
    FAIL() << "expected DslError";
  } catch (const DslError& e) {
    EXPECT_EQ(e.phase(), Phase::Typecheck);
    EXPECT_EQ(e.name(), "gripper_torque");
    EXPECT_EQ(e.rule(), "r");
  }
}

TEST(Parse, SyntaxErrorsCarryPositions) {
  try {
    parse("(program\n  (rule r (when true) (add 0.1))\n  (rule s (when (and true)) (add 0.1)))");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.phase(), Phase::Parse);
    EXPECT_EQ(e.loc().line, 3);
    EXPECT_EQ(e.loc().column, 18);
  }
  EXPECT_THROW(parse("(program (rule r (when true) (add 0.1))"), DslError);
  EXPECT_THROW(parse("(program (rule r (when \"open)))"), DslError);
  EXPECT_THROW(parse("(program (rule r (when true) (add 1.2.3)))"), DslError);
  EXPECT_THROW(parse("(program (rule r (when true)) (rule r (when true)))"), DslError);
  EXPECT_THROW(parse("(program (rule r (when (frobnicate 1 2))))"), DslError);
  EXPECT_THROW(parse("(program) extra"), DslError);
}

TEST(Parse, TypeErrors) {
  auto expect_type_error = [](const char* src) {
    try {
      parse(src);
      ADD_FAILURE() << src;
    } catch (const DslError& e) {
      EXPECT_EQ(e.phase(), Phase::Typecheck) << src;
    }
  };
  expect_type_error("(program (rule r (when 1) (add 0.1)))");
  expect_type_error("(program (rule r (when (< event_text 1)) (add 0.1)))");
  expect_type_error("(program (rule r (when true) (add true)))");
  expect_type_error("(program (rule r (when (= carrying 1)) (add 0.1)))");
  expect_type_error("(program (rule r (when (contains step_count \"x\")) (add 0.1)))");
}

TEST(Parse, Limits) {
  std::string many = "(program";
  for (int i = 0; i < 33; ++i) many += " (rule r" + std::to_string(i) + " (when true))";
  many += ")";
  EXPECT_THROW(parse(many), DslError);

  std::string deep = "true";
  for (int i = 0; i < 16; ++i) deep = "(not " + deep + ")";
  EXPECT_THROW(parse("(program (rule r (when " + deep + ")))"), DslError);
  std::string ok = "true";
  for (int i = 0; i < 15; ++i) ok = "(not " + ok + ")";
  EXPECT_NO_THROW(parse("(program (rule r (when " + ok + ")))"));

  EXPECT_THROW(parse(std::string(kMaxSourceBytes + 1, ' ')), DslError);
}

TEST(Parse, CommentsAndStringEscapes) {
  auto p = parse("; header\n(program (rule r (when (contains event_text \"a\\\"b\\\\c\")) (add 0.1))) ; tail");
  EXPECT_EQ(p.rules[0].condition.args[1].text, "a\"b\\c");
  EXPECT_EQ(parse(print(p)), p);
}

TEST(Print, CanonicalLayout) {
  EXPECT_EQ(print(parse("(program)")), "(program)\n");
  EXPECT_EQ(print(parse(kKeyBonus)), kKeyBonus);
}

TEST(Print, NumbersRoundTrip) {
  for (double v : {0.1, 0.2, 1e-7, 123456.789, -0.25, 1.0 / 3.0, 5e300}) {
    RewardProgram p;
    p.rules.push_back({"r", Expr::make_bool(true), {{Effect::Kind::Add, "", Expr::make_number(v), {}}}, {}});
    EXPECT_EQ(parse(print(p)), p) << v;
  }
}

TEST(Evaluate, KeyPickupOnce) {
  auto p = parse(kKeyBonus);
  const auto t = grid_step(3, "picked up yellow key", "yellow key");
  ShapingState empty;
  auto r1 = evaluate(p, t, empty);
  EXPECT_DOUBLE_EQ(r1.shaped_reward, 0.2);
  EXPECT_TRUE(r1.state.flags.at("key_picked_up"));
  EXPECT_TRUE(empty.flags.empty());  // input untouched

  auto r2 = evaluate(p, t, r1.state);
  EXPECT_DOUBLE_EQ(r2.shaped_reward, 0.0);
  EXPECT_EQ(r2.state, r1.state);
}

TEST(Evaluate, FloodingAccumulates) {
  auto p = parse(kForwardFlood);
  ShapingState s;
  double total = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto r = evaluate(p, grid_step(2), s);
    total += r.shaping;
    s = r.state;
  }
  EXPECT_NEAR(total, 2.0, 1e-12);
}

TEST(Evaluate, EmptyProgramIsIdentity) {
  auto p = parse("(program)");
  auto t = grid_step(2, "reached goal");
  t.raw_reward = 0.75;
  EXPECT_EQ(evaluate(p, t, {}).shaped_reward, 0.75);
}

TEST(Evaluate, RulesSeeEarlierEffects) {
  auto p = parse(R"((program
    (rule a (when true) (set-num n 2) (add (num n)))
    (rule b (when (> (num n) 1)) (add 0.5) (set-num n (+ (num n) 1)))))");
  auto r = evaluate(p, grid_step(0), {});
  EXPECT_DOUBLE_EQ(r.shaping, 2.5);
  EXPECT_DOUBLE_EQ(r.state.numbers.at("n"), 3.0);
}

TEST(Evaluate, ContainsIsCaseInsensitive) {
  auto p = parse("(program (rule r (when (contains event_text \"Opened Door\")) (add 0.3)))");
  EXPECT_DOUBLE_EQ(evaluate(p, grid_step(5, "opened door"), {}).shaping, 0.3);
}

TEST(Evaluate, OverflowSaturates) {
  auto p = parse("(program (rule r (when true) (add (* 1e300 1e300))))");
  auto r = evaluate(p, grid_step(0), {});
  EXPECT_EQ(r.shaping, kSaturation);
  EXPECT_FALSE(r.advisories.empty());
}

TEST(Evaluate, ClampIsOptional) {
  auto p = parse("(program (rule r (when true) (add 3)))");
  EXPECT_EQ(evaluate(p, grid_step(0), {}).shaping, 3.0);
  EXPECT_EQ(evaluate(p, grid_step(0), {}, {true}).shaping, 1.0);
}

TEST(Evaluate, MissingFieldThrows) {
  auto p = parse("(program (rule r (when (> velocity 1)) (add 0.1)))");
  EXPECT_THROW(evaluate(p, grid_step(0), {}), DslError);
}

TEST(Validate, KeyBonusIsClean) {
  auto rep = validate(kKeyBonus);
  EXPECT_TRUE(rep.ok);
  EXPECT_TRUE(rep.advisories.empty());
}

TEST(Validate, MagnitudeAdvisory) {
  auto rep = validate("(program (rule big (when (contains event_text \"reached\")) (add 0.9)))");
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.advisories.size(), 1u);
}

TEST(Validate, UnknownFieldFails) {
  auto rep = validate("(program (rule r (when (> joint_angle 0)) (add 0.1)))");
  EXPECT_FALSE(rep.ok);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0].phase, Phase::Typecheck);
}

TEST(Validate, FieldAvailabilityPerEnv) {
  const char* src = "(program (rule r (when (< distance_to_target 0.2)) (add 0.1) (set-flag near)))";
  EXPECT_TRUE(validate(src, envs::EnvKind::Reach).ok);
  EXPECT_FALSE(validate(src, envs::EnvKind::Grid).ok);
  EXPECT_TRUE(validate(src).ok);
  EXPECT_FALSE(validate("(program (rule r (when (and (= action 2) (> velocity 1))) (add 0.1)))").ok);
}

TEST(Validate, BatteryHasEightEntries) {
  EXPECT_EQ(dry_run_battery().size(), 8u);
}

TEST(Lint, ForwardBonusFloods) {
  auto rep = lint(kForwardFlood);
  ASSERT_TRUE(rep.has(LintCategory::Flooding));
  EXPECT_EQ(rep.findings[0].rule_name, "forward_bonus");
}

TEST(Lint, CarryingBonusFloods) {
  auto rep = lint("(program (rule hold (when (= carrying \"yellow key\")) (add 0.01)))");
  EXPECT_TRUE(rep.has(LintCategory::Flooding));
}

TEST(Lint, HoldingKeyBonusFloodsDespiteForeignGate) {
  auto rep = lint(R"((program
    (rule key_bonus
      (when (and (contains event_text "picked up") (not (flag key_picked_up))))
      (add 0.2)
      (set-flag key_picked_up))
    (rule holding_key
      (when (and (flag key_picked_up) (not (flag door_opened)) (contains carrying "key")))
      (add 0.01))))");
  ASSERT_EQ(rep.findings.size(), 1u);
  EXPECT_EQ(rep.findings[0].category, LintCategory::Flooding);
  EXPECT_EQ(rep.findings[0].rule_name, "holding_key");
}

TEST(Lint, GatedKeyBonusIsClean) { EXPECT_TRUE(lint(kKeyBonus).clean()); }

TEST(Lint, ProgressTrackingIsNotFlooding) {
  auto rep = lint(R"((program
    (rule progress (when (> agent_x (num best_x))) (add 0.05) (set-num best_x agent_x))))");
  EXPECT_TRUE(rep.clean());
}

TEST(Lint, ActionIndexOutOfRange) {
  auto rep = lint("(program (rule r (when (and (= action 8) (contains event_text \"opened\"))) (add 0.2)))");
  ASSERT_TRUE(rep.has(LintCategory::ApiMisuse));
  EXPECT_EQ(rep.findings[0].rule_name, "r");
  EXPECT_TRUE(lint("(program (rule r (when (and (= 1.5 action) (contains event_text \"x\"))) (add 0.2)))")
                  .has(LintCategory::ApiMisuse));
}

TEST(Lint, UnknownFieldIsApiMisuse) {
  auto rep = lint("(program (rule grip (when (> gripper_torque 0)) (add 0.1)))");
  ASSERT_TRUE(rep.has(LintCategory::ApiMisuse));
  EXPECT_EQ(rep.findings[0].rule_name, "grip");
  EXPECT_TRUE(lint("(program (rule v (when (> velocity 0)) (add 0.1)))", envs::EnvKind::Grid)
                  .has(LintCategory::ApiMisuse));
}

TEST(Lint, WeakShaping) {
  auto rep = lint("(program (rule a (when (> step_count 0)) (add 0.01)) (rule b (when true) (add 0.01)))");
  EXPECT_TRUE(rep.has(LintCategory::WeakShaping));
  auto gated = lint("(program (rule a (when (and (contains event_text \"picked up\") (not (flag k)))) (add 0.01) "
                    "(set-flag k)))");
  EXPECT_FALSE(gated.has(LintCategory::WeakShaping));
  EXPECT_FALSE(lint(kKeyBonus).has(LintCategory::WeakShaping));
}

TEST(Lint, SyntaxErrorPropagates) { EXPECT_THROW(lint("(program"), DslError); }

TEST(Potential, TwoMilestones) {
  auto r = check_potential_equivalence({{"key", 0.2}, {"door", 0.3}}, {"key", "door"});
  EXPECT_DOUBLE_EQ(r.total_shaping, 0.5);
  EXPECT_DOUBLE_EQ(r.potential_delta, 0.5);
  EXPECT_TRUE(r.equal);
}

TEST(Potential, NothingFired) {
  auto r = check_potential_equivalence({{"key", 0.2}}, {});
  EXPECT_EQ(r.total_shaping, 0.0);
  EXPECT_EQ(r.potential_delta, 0.0);
  EXPECT_TRUE(r.equal);
}

TEST(Potential, RepeatedMilestoneIsViolation) {
  EXPECT_THROW(check_potential_equivalence({{"key", 0.2}}, {"key", "key"}), ContractViolation);
}

TEST(Potential, OneTimeBonusIsLengthInvariant) {
  auto p = parse(kKeyBonus);
  for (int length : {10, 100, 1000}) {
    ShapingState s;
    double total = 0.0;
    for (int i = 0; i < length; ++i) {
      auto t = grid_step(i % 7, i % 5 == 3 ? "picked up yellow key" : "");
      auto r = evaluate(p, t, s);
      total += r.shaping;
      s = r.state;
    }
    EXPECT_DOUBLE_EQ(total, 0.2) << length;
  }
}

TEST(Fuzz, RoundTripAndEvaluate) {
  Rng rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const auto program = testing_support::random_program(rng);
    const std::string text = print(program);
    const auto parsed = parse(text);
    ASSERT_EQ(parsed, program) << text;
    ASSERT_EQ(print(parsed), text);
    ShapingState s;
    for (const auto& entry : dry_run_battery()) {
      if (entry.transition.kind != envs::EnvKind::Grid) continue;
      auto r = evaluate(parsed, entry.transition, s);
      ASSERT_TRUE(std::isfinite(r.shaped_reward));
      s = r.state;
    }
  }
}
