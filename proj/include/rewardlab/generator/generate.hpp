#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/dsl/printer.hpp"
#include "rewardlab/dsl/validate.hpp"
#include "rewardlab/errors.hpp"
#include "rewardlab/generator/client.hpp"

namespace rewardlab::generator {

struct RetryPolicy {
  int max_retries = 3;
  double temperature = kDefaultTemperature;
};

struct Attempt {
  PromptBundle prompt;
  std::string completion;
  bool ok = false;
  std::string errors;  // validation report summary or transport error
};

struct GenerationResult {
  dsl::RewardProgram program;
  std::string program_text;  // canonical form
  int attempts = 0;
  std::vector<Attempt> transcript;
};

class GenerationFailed : public GeneratorError {
 public:
  explicit GenerationFailed(std::vector<Attempt> attempts)
      : GeneratorError("reward program generation failed after " + std::to_string(attempts.size()) + " attempts"),
        attempts_(std::move(attempts)) {}
  const std::vector<Attempt>& attempts() const { return attempts_; }

 private:
  std::vector<Attempt> attempts_;
};

// First fenced code block in the completion, or the whole completion.
inline std::string extract_program(const std::string& completion) {
  const auto open = completion.find("```");
  if (open == std::string::npos) return completion;
  auto body = completion.find('\n', open);
  if (body == std::string::npos) return completion;
  ++body;
  const auto close = completion.find("```", body);
  return completion.substr(body, close == std::string::npos ? std::string::npos : close - body);
}

// complete -> parse -> validate, re-prompting with the errors on failure.
inline GenerationResult generate_program(GeneratorClient& client, const PromptBundle& prompt,
                                         const RetryPolicy& policy = {},
                                         std::optional<envs::EnvKind> kind = std::nullopt) {
  require(policy.max_retries >= 0, "max_retries must be >= 0");
  std::vector<Attempt> transcript;
  PromptBundle current = prompt;
  for (int attempt = 1; attempt <= 1 + policy.max_retries; ++attempt) {
    Attempt a;
    a.prompt = current;
    try {
      a.completion = client.complete(current, policy.temperature);
    } catch (const AuthMissing&) {
      throw;
    } catch (const GeneratorError& e) {
      a.errors = std::string("transport: ") + e.what() + "\n";
      transcript.push_back(a);
      break;
    }
    const auto report = dsl::validate(extract_program(a.completion), kind);
    a.ok = report.ok;
    a.errors = report.summary();
    transcript.push_back(a);
    if (report.ok) {
      GenerationResult r;
      r.program = *report.program;
      r.program_text = dsl::print(r.program);
      r.attempts = attempt;
      r.transcript = std::move(transcript);
      return r;
    }
    current = with_error_feedback(prompt, attempt, a.errors, a.completion);
  }
  throw GenerationFailed(std::move(transcript));
}

inline nlohmann::json to_json(const Attempt& a) {
  return {{"mode", std::string(to_string(a.prompt.mode))},
          {"system", a.prompt.system_text},
          {"user", a.prompt.user_text},
          {"completion", a.completion},
          {"ok", a.ok},
          {"errors", a.errors}};
}

}  // namespace rewardlab::generator
