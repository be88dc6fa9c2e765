#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rewardlab/dsl/ast.hpp"

namespace rewardlab::dsl {

namespace detail {

struct Token {
  enum class Kind { LParen, RParen, Atom, String, End };
  Kind kind = Kind::End;
  std::string text;
  SourceLoc loc;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == ';') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    const SourceLoc loc{line, col};
    if (c == '(' || c == ')') {
      out.push_back({c == '(' ? Token::Kind::LParen : Token::Kind::RParen, std::string(1, c), loc});
      advance();
      continue;
    }
    if (c == '"') {
      advance();
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        const char d = src[i];
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        if (d == '\\') {
          advance();
          if (i >= src.size()) break;
          const char e = src[i];
          if (e == 'n') text += '\n';
          else if (e == '"' || e == '\\') text += e;
          else throw DslError(Phase::Parse, std::string("unknown escape '\\") + e + "' in string", {line, col});
          advance();
          continue;
        }
        if (d == '\n') throw DslError(Phase::Parse, "newline inside string literal", {line, col});
        text += d;
        advance();
      }
      if (!closed) throw DslError(Phase::Parse, "unterminated string literal", loc);
      out.push_back({Token::Kind::String, std::move(text), loc});
      continue;
    }
    std::string atom;
    while (i < src.size()) {
      const char d = src[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '"' || d == ';') break;
      atom += d;
      advance();
    }
    out.push_back({Token::Kind::Atom, std::move(atom), loc});
  }
  out.push_back({Token::Kind::End, "", {line, col}});
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline bool looks_numeric(std::string_view s) {
  if (s.empty()) return false;
  std::size_t k = (s[0] == '-') ? 1 : 0;
  return k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '.');
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  RewardProgram parse_program() {
    expect_lparen("program");
    expect_keyword("program");
    RewardProgram program;
    std::set<std::string> names;
    while (peek().kind == Token::Kind::LParen) {
      if (program.rules.size() == kMaxRules)
        throw DslError(Phase::Parse, "program exceeds " + std::to_string(kMaxRules) + " rules", peek().loc);
      Rule rule = parse_rule();
      if (!names.insert(rule.name).second)
        throw DslError(Phase::Parse, "duplicate rule name '" + rule.name + "'", rule.loc, rule.name, rule.name);
      program.rules.push_back(std::move(rule));
    }
    expect_rparen();
    if (peek().kind != Token::Kind::End) throw DslError(Phase::Parse, "trailing input after program", peek().loc);
    return program;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Token::Kind::End) ++pos_;
    return t;
  }

  void expect_lparen(std::string_view context) {
    const Token& t = next();
    if (t.kind != Token::Kind::LParen)
      throw DslError(Phase::Parse, "expected '(' to start " + std::string(context) + ", found " + describe(t), t.loc,
                     {}, rule_);
  }
  void expect_rparen() {
    const Token& t = next();
    if (t.kind != Token::Kind::RParen)
      throw DslError(Phase::Parse, "expected ')', found " + describe(t), t.loc, {}, rule_);
  }
  void expect_keyword(std::string_view kw) {
    const Token& t = next();
    if (t.kind != Token::Kind::Atom || t.text != kw)
      throw DslError(Phase::Parse, "expected '" + std::string(kw) + "', found " + describe(t), t.loc, {}, rule_);
  }
  std::string expect_identifier(std::string_view what) {
    const Token& t = next();
    if (t.kind != Token::Kind::Atom || !is_identifier(t.text))
      throw DslError(Phase::Parse, "expected " + std::string(what) + " identifier, found " + describe(t), t.loc, {},
                     rule_);
    return t.text;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::LParen: return "'('";
      case Token::Kind::RParen: return "')'";
      case Token::Kind::String: return "string \"" + t.text + "\"";
      case Token::Kind::Atom: return "'" + t.text + "'";
      case Token::Kind::End: return "end of input";
    }
    return "?";
  }

  Rule parse_rule() {
    Rule rule;
    rule.loc = peek().loc;
    expect_lparen("rule");
    expect_keyword("rule");
    rule.name = expect_identifier("rule name");
    rule_ = rule.name;
    expect_lparen("when clause");
    expect_keyword("when");
    rule.condition = parse_expr(1);
    expect_rparen();
    while (peek().kind == Token::Kind::LParen) rule.effects.push_back(parse_effect());
    expect_rparen();
    rule_.clear();
    return rule;
  }

  Effect parse_effect() {
    Effect effect;
    effect.loc = peek().loc;
    expect_lparen("effect");
    const Token& head = next();
    if (head.kind == Token::Kind::Atom && head.text == "add") {
      effect.kind = Effect::Kind::Add;
      effect.value = parse_expr(1);
    } else if (head.kind == Token::Kind::Atom && head.text == "set-flag") {
      effect.kind = Effect::Kind::SetFlag;
      effect.key = expect_identifier("flag key");
    } else if (head.kind == Token::Kind::Atom && head.text == "set-num") {
      effect.kind = Effect::Kind::SetNum;
      effect.key = expect_identifier("number key");
      effect.value = parse_expr(1);
    } else {
      throw DslError(Phase::Parse, "expected effect (add, set-flag, set-num), found " + describe(head), head.loc, {},
                     rule_);
    }
    expect_rparen();
    return effect;
  }

  Expr parse_expr(int depth) {
    if (depth > kMaxDepth)
      throw DslError(Phase::Parse, "expression nesting exceeds depth " + std::to_string(kMaxDepth), peek().loc, {},
                     rule_);
    const Token& t = next();
    Expr e;
    switch (t.kind) {
      case Token::Kind::String:
        e = Expr::make_text(t.text);
        break;
      case Token::Kind::Atom:
        e = parse_atom(t);
        break;
      case Token::Kind::LParen: {
        const Token& head = next();
        if (head.kind != Token::Kind::Atom)
          throw DslError(Phase::Parse, "expected operator, found " + describe(head), head.loc, {}, rule_);
        if (head.text == "flag" || head.text == "num") {
          std::string key = expect_identifier("state key");
          e = head.text == "flag" ? Expr::make_flag(std::move(key)) : Expr::make_num(std::move(key));
        } else {
          const auto op = lookup_op(head.text);
          if (!op) throw DslError(Phase::Parse, "unknown operator '" + head.text + "'", head.loc, head.text, rule_);
          std::vector<Expr> args;
          while (peek().kind != Token::Kind::RParen && peek().kind != Token::Kind::End)
            args.push_back(parse_expr(depth + 1));
          const auto& info = op_info(*op);
          const int n = static_cast<int>(args.size());
          if (n < info.min_args || (info.max_args >= 0 && n > info.max_args))
            throw DslError(Phase::Parse,
                           "operator '" + std::string(info.name) + "' given " + std::to_string(n) + " argument(s)",
                           head.loc, {}, rule_);
          e = Expr::make_call(*op, std::move(args));
        }
        expect_rparen();
        break;
      }
      case Token::Kind::RParen:
      case Token::Kind::End:
        throw DslError(Phase::Parse, "expected expression, found " + describe(t), t.loc, {}, rule_);
    }
    e.loc = t.loc;
    return e;
  }

  Expr parse_atom(const Token& t) {
    if (t.text == "true") return Expr::make_bool(true);
    if (t.text == "false") return Expr::make_bool(false);
    if (looks_numeric(t.text)) {
      double v = 0.0;
      const char* first = t.text.data();
      const char* last = first + t.text.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw DslError(Phase::Parse, "malformed number '" + t.text + "'", t.loc, {}, rule_);
      return Expr::make_number(v);
    }
    if (const auto field = lookup_field(t.text)) return Expr::make_field(*field);
    if (is_identifier(t.text))
      throw DslError(Phase::Typecheck, "unknown field '" + t.text + "'", t.loc, t.text, rule_);
    throw DslError(Phase::Parse, "unexpected token '" + t.text + "'", t.loc, {}, rule_);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string rule_;
};

inline ValueType type_of(const Expr& e, const std::string& rule) {
  auto fail = [&](const std::string& msg) -> ValueType { throw DslError(Phase::Typecheck, msg, e.loc, {}, rule); };
  switch (e.kind) {
    case Expr::Kind::Number: return ValueType::Number;
    case Expr::Kind::Boolean: return ValueType::Boolean;
    case Expr::Kind::Text: return ValueType::Text;
    case Expr::Kind::Field: return field_info(e.field).type;
    case Expr::Kind::Flag: return ValueType::Boolean;
    case Expr::Kind::Num: return ValueType::Number;
    case Expr::Kind::Call: break;
  }
  const std::string name(op_info(e.op).name);
  auto all_of_type = [&](ValueType want, const char* what) {
    for (const auto& a : e.args)
      if (type_of(a, rule) != want) fail("'" + name + "' expects " + what + " arguments");
  };
  switch (e.op) {
    case Op::Contains:
      all_of_type(ValueType::Text, "text");
      return ValueType::Boolean;
    case Op::Eq:
      if (type_of(e.args[0], rule) != type_of(e.args[1], rule)) return fail("'=' compares values of different types");
      return ValueType::Boolean;
    case Op::Lt:
    case Op::Gt:
    case Op::Le:
    case Op::Ge:
      all_of_type(ValueType::Number, "numeric");
      return ValueType::Boolean;
    case Op::And:
    case Op::Or:
    case Op::Not:
      all_of_type(ValueType::Boolean, "boolean");
      return ValueType::Boolean;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Min:
    case Op::Max:
    case Op::Abs:
      all_of_type(ValueType::Number, "numeric");
      return ValueType::Number;
  }
  return fail("unknown operator");
}

}  // namespace detail

// Structural type check: conditions are boolean, add/set-num values numeric.
inline void typecheck(const RewardProgram& program) {
  for (const auto& rule : program.rules) {
    if (detail::type_of(rule.condition, rule.name) != ValueType::Boolean)
      throw DslError(Phase::Typecheck, "rule condition must be boolean", rule.condition.loc, {}, rule.name);
    for (const auto& effect : rule.effects) {
      if (effect.kind == Effect::Kind::SetFlag) continue;
      if (detail::type_of(effect.value, rule.name) != ValueType::Number)
        throw DslError(Phase::Typecheck, "effect value must be numeric", effect.value.loc, {}, rule.name);
    }
  }
}

// Parses and type checks. Throws DslError (phase Parse or Typecheck).
inline RewardProgram parse(std::string_view text) {
  if (text.size() > kMaxSourceBytes)
    throw DslError(Phase::Parse, "program text exceeds " + std::to_string(kMaxSourceBytes) + " bytes");
  detail::Parser parser(detail::tokenize(text));
  RewardProgram program = parser.parse_program();
  typecheck(program);
  program.source_text = std::string(text);
  return program;
}

template <typename Fn>
void visit_exprs(const Expr& e, Fn&& fn) {
  fn(e);
  for (const auto& a : e.args) visit_exprs(a, fn);
}

template <typename Fn>
void visit_exprs(const RewardProgram& program, Fn&& fn) {
  for (const auto& rule : program.rules) {
    visit_exprs(rule.condition, fn);
    for (const auto& effect : rule.effects)
      if (effect.kind != Effect::Kind::SetFlag) visit_exprs(effect.value, fn);
  }
}

inline std::set<Field> referenced_fields(const RewardProgram& program) {
  std::set<Field> out;
  visit_exprs(program, [&](const Expr& e) {
    if (e.kind == Expr::Kind::Field) out.insert(e.field);
  });
  return out;
}

// Env-specific check: every field the program reads must be exposed by the
// environment family. Throws DslError(Typecheck) naming the first offender.
inline void check_fields(const RewardProgram& program, envs::EnvKind kind) {
  for (const auto& rule : program.rules) {
    auto check = [&](const Expr& e) {
      if (e.kind == Expr::Kind::Field && !field_available(e.field, kind)) {
        const std::string name(field_info(e.field).name);
        throw DslError(Phase::Typecheck, "field '" + name + "' is not available in this environment", e.loc, name,
                       rule.name);
      }
    };
    visit_exprs(rule.condition, check);
    for (const auto& effect : rule.effects)
      if (effect.kind != Effect::Kind::SetFlag) visit_exprs(effect.value, check);
  }
}

}  // namespace rewardlab::dsl
