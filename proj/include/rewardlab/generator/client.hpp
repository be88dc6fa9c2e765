#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rewardlab/errors.hpp"
#include "rewardlab/generator/prompts.hpp"

namespace rewardlab::generator {

inline constexpr double kDefaultTemperature = 0.4;

class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  virtual std::string complete(const PromptBundle& prompt, double temperature) = 0;
  virtual std::string name() const = 0;
};

// One client per run; runs never share a client.
using ClientFactory = std::function<std::unique_ptr<GeneratorClient>()>;

struct ScriptedScenario {
  std::string name;
  std::vector<std::string> programs;
};

// Replays a scenario, one program per call. Records every prompt it receives.
class ScriptedGenerator : public GeneratorClient {
 public:
  explicit ScriptedGenerator(ScriptedScenario scenario) : scenario_(std::move(scenario)) {}

  std::string complete(const PromptBundle& prompt, double temperature) override {
    if (calls_ >= scenario_.programs.size())
      throw GeneratorError("scripted scenario '" + scenario_.name + "' exhausted after " + std::to_string(calls_) +
                           " calls");
    prompts_.push_back(prompt);
    temperatures_.push_back(temperature);
    return scenario_.programs[calls_++];
  }

  std::string name() const override { return "scripted:" + scenario_.name; }
  std::size_t calls() const { return calls_; }
  const std::vector<PromptBundle>& prompts() const { return prompts_; }
  const std::vector<double>& temperatures() const { return temperatures_; }

 private:
  ScriptedScenario scenario_;
  std::size_t calls_ = 0;
  std::vector<PromptBundle> prompts_;
  std::vector<double> temperatures_;
};

}  // namespace rewardlab::generator
