#pragma once

#include <stdexcept>
#include <string>

namespace rewardlab {

// Bad user-supplied configuration: unknown env id, malformed plan, etc.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A training run had to stop early (NaN loss, advisory storm).
class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure talking to a program generator (transport, exhausted script).
class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The HTTP generator needs an API key that is not set.
class AuthMissing : public GeneratorError {
 public:
  using GeneratorError::GeneratorError;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace rewardlab
