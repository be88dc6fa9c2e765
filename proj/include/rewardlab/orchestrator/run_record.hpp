#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/diagnostics.hpp"
#include "rewardlab/generator/generate.hpp"
#include "rewardlab/orchestrator/condition.hpp"
#include "rewardlab/ppo/run_log.hpp"

namespace rewardlab::orchestrator {

enum class RunStatus { Ok, GenerationFailed, TrainingAborted };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::GenerationFailed: return "generation_failed";
    case RunStatus::TrainingAborted: return "training_aborted";
  }
  return "?";
}

inline RunStatus parse_run_status(std::string_view s) {
  for (auto v : {RunStatus::Ok, RunStatus::GenerationFailed, RunStatus::TrainingAborted})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown run status '" + std::string(s) + "'");
}

// One program and, when it was probed, its probe outcome.
struct IterationRecord {
  std::string program_text;
  std::vector<generator::Attempt> attempts;  // empty for cached or built-in programs
  bool from_cache = false;
  std::optional<ppo::ProbeMetrics> probe;
  std::vector<ppo::EpisodeRecord> probe_episodes;
  std::optional<diagnostics::Diagnosis> diagnosis;
};

struct RunRecord {
  Condition condition;
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;  // refinement history, or best-of-N candidates
  std::optional<int> winner;                // best-of-N winning candidate index
  std::vector<std::vector<generator::Attempt>> failed_generations;
  std::optional<ppo::TrainRunLog> final_log;
  std::optional<ppo::ProbeMetrics> final_metrics;
  std::string final_program_text;  // empty when trained without a program
  long total_episodes_used = 0;
  RunStatus status = RunStatus::Ok;
  std::string error;
  // Crossed designs: which program row this run belongs to.
  std::optional<std::uint64_t> program_seed;

  int programs_generated() const { return static_cast<int>(iterations.size()); }
};

inline nlohmann::json attempts_json(const std::vector<generator::Attempt>& attempts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : attempts) out.push_back(generator::to_json(a));
  return out;
}

inline std::vector<generator::Attempt> attempts_from_json(const nlohmann::json& j) {
  std::vector<generator::Attempt> out;
  for (const auto& a : j) {
    generator::Attempt at;
    at.prompt.mode = generator::parse_prompt_mode(a.at("mode").get<std::string>());
    at.prompt.system_text = a.at("system").get<std::string>();
    at.prompt.user_text = a.at("user").get<std::string>();
    at.completion = a.at("completion").get<std::string>();
    at.ok = a.at("ok").get<bool>();
    at.errors = a.at("errors").get<std::string>();
    out.push_back(std::move(at));
  }
  return out;
}

inline nlohmann::json metrics_json(const ppo::ProbeMetrics& m) { return ppo::to_json(m); }

inline ppo::ProbeMetrics metrics_from_json(const nlohmann::json& j) {
  ppo::ProbeMetrics m;
  m.success_rate = j.at("success_rate").get<double>();
  m.mean_reward = j.at("mean_reward").get<double>();
  m.episodes = j.at("episodes").get<int>();
  return m;
}

// Record summary without the bulky per-episode logs and prompt text, which are
// stored as separate files in the run directory. Contains no wall-clock values.
inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& it : r.iterations) {
    nlohmann::json j = {{"program", it.program_text}, {"attempts", it.attempts.size()}, {"from_cache", it.from_cache}};
    if (it.probe) j["probe"] = metrics_json(*it.probe);
    if (it.diagnosis) j["diagnosis"] = diagnostics::to_json(*it.diagnosis);
    iterations.push_back(std::move(j));
  }
  nlohmann::json j = {{"condition", to_string(r.condition)},
                      {"prompt_mode", std::string(generator::to_string(r.condition.prompt_mode))},
                      {"env", std::string(envs::to_string(r.env))},
                      {"seed", r.seed},
                      {"iterations", iterations},
                      {"failed_generations", r.failed_generations.size()},
                      {"final_program", r.final_program_text},
                      {"total_episodes_used", r.total_episodes_used},
                      {"status", std::string(to_string(r.status))},
                      {"error", r.error}};
  if (r.winner) j["winner"] = *r.winner;
  if (r.program_seed) j["program_seed"] = *r.program_seed;
  if (r.final_metrics) j["final"] = metrics_json(*r.final_metrics);
  if (r.final_log) {
    j["final_episodes"] = r.final_log->episodes.size();
    j["final_total_steps"] = r.final_log->total_steps;
    j["config"] = r.final_log->config;
  }
  return j;
}

// Inverse of to_json; per-episode data and prompts are attached by the caller.
inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.condition = parse_condition(j.at("condition").get<std::string>());
  r.condition.prompt_mode = generator::parse_prompt_mode(j.at("prompt_mode").get<std::string>());
  r.env = envs::parse_env_id(j.at("env").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& it : j.at("iterations")) {
    IterationRecord ir;
    ir.program_text = it.at("program").get<std::string>();
    ir.from_cache = it.value("from_cache", false);
    if (it.contains("probe")) ir.probe = metrics_from_json(it.at("probe"));
    if (it.contains("diagnosis")) ir.diagnosis = diagnostics::diagnosis_from_json(it.at("diagnosis"));
    r.iterations.push_back(std::move(ir));
  }
  r.final_program_text = j.at("final_program").get<std::string>();
  r.total_episodes_used = j.at("total_episodes_used").get<long>();
  r.status = parse_run_status(j.at("status").get<std::string>());
  r.error = j.value("error", "");
  if (j.contains("winner")) r.winner = j.at("winner").get<int>();
  if (j.contains("program_seed")) r.program_seed = j.at("program_seed").get<std::uint64_t>();
  if (j.contains("final")) r.final_metrics = metrics_from_json(j.at("final"));
  return r;
}

}  // namespace rewardlab::orchestrator
