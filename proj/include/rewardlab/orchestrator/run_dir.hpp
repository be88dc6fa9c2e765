#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/orchestrator/orchestrator.hpp"
#include "rewardlab/orchestrator/plan.hpp"

namespace rewardlab::orchestrator {

namespace fs = std::filesystem;

inline constexpr int kArtifactVersion = 1;

// Builds a client factory for a given environment (scripted scenarios depend on the env kind).
using ClientProvider = std::function<generator::ClientFactory(envs::EnvId)>;

struct BatchResult {
  std::string label;
  envs::EnvId env = envs::EnvId::DoorKey5;
  Condition condition;
  bool crossed = false;
  std::vector<RunRecord> records;  // crossed: row-major over (program, train seed)
};

struct PlanResult {
  fs::path dir;
  std::string digest;
  Plan plan;
  std::vector<BatchResult> batches;

  int failures() const {
    int n = 0;
    for (const auto& b : batches)
      for (const auto& r : b.records) n += r.status != RunStatus::Ok;
    return n;
  }
  const BatchResult* find(const std::string& label) const {
    for (const auto& b : batches)
      if (b.label == label) return &b;
    return nullptr;
  }
};

struct ExecuteOptions {
  int parallelism = 1;
  ClientProvider clients;
  bool reuse_existing = true;  // skip runs whose record.json is already on disk
};

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline fs::path record_dir(const fs::path& root, const std::string& label, const RunRecord& r) {
  fs::path d = root / "runs" / label;
  if (r.program_seed) d /= "program_" + std::to_string(*r.program_seed);
  return d / ("seed_" + std::to_string(r.seed));
}

inline void save_record(const fs::path& dir, const RunRecord& r) {
  fs::create_directories(dir);
  write_text(dir / "record.json", to_json(r).dump(2) + "\n");
  if (r.final_log) write_text(dir / "episodes.jsonl", ppo::to_jsonl(r.final_log->episodes));
  for (std::size_t k = 0; k < r.iterations.size(); ++k) {
    const auto& it = r.iterations[k];
    if (!it.probe_episodes.empty())
      write_text(dir / "probes" / ("iter_" + std::to_string(k) + ".jsonl"), ppo::to_jsonl(it.probe_episodes));
    for (std::size_t a = 0; a < it.attempts.size(); ++a)
      write_text(dir / "prompts" / ("iter_" + std::to_string(k) + "_attempt_" + std::to_string(a) + ".json"),
                 generator::to_json(it.attempts[a]).dump(2) + "\n");
  }
  for (std::size_t g = 0; g < r.failed_generations.size(); ++g)
    for (std::size_t a = 0; a < r.failed_generations[g].size(); ++a)
      write_text(dir / "prompts" / ("failed_" + std::to_string(g) + "_attempt_" + std::to_string(a) + ".json"),
                 generator::to_json(r.failed_generations[g][a]).dump(2) + "\n");
}

// Record plus final and probe episode logs and generation transcripts.
inline RunRecord load_record(const fs::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(dir / "record.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt record " + (dir / "record.json").string() + ": " + e.what());
  }
  RunRecord r = record_from_json(j);
  if (fs::exists(dir / "episodes.jsonl")) {
    ppo::TrainRunLog log;
    log.env = r.env;
    log.seed = r.seed;
    log.episodes = ppo::parse_jsonl(read_text(dir / "episodes.jsonl"));
    log.total_steps = j.value("final_total_steps", 0L);
    if (j.contains("config")) ppo::apply_overrides(log.config, j.at("config"));
    r.final_log = std::move(log);
  }
  auto attempts = [&](const std::string& prefix) {
    std::vector<generator::Attempt> out;
    for (std::size_t a = 0;; ++a) {
      const auto p = dir / "prompts" / (prefix + "_attempt_" + std::to_string(a) + ".json");
      if (!fs::exists(p)) return out;
      out.push_back(attempts_from_json(nlohmann::json::array({nlohmann::json::parse(read_text(p))}))[0]);
    }
  };
  for (std::size_t k = 0; k < r.iterations.size(); ++k) {
    const auto p = dir / "probes" / ("iter_" + std::to_string(k) + ".jsonl");
    if (fs::exists(p)) r.iterations[k].probe_episodes = ppo::parse_jsonl(read_text(p));
    r.iterations[k].attempts = attempts("iter_" + std::to_string(k));
  }
  for (std::size_t g = 0; g < j.at("failed_generations").get<std::size_t>(); ++g)
    r.failed_generations.push_back(attempts("failed_" + std::to_string(g)));
  return r;
}

namespace detail {

struct Task {
  std::size_t batch;
  std::size_t slot;
  std::function<RunRecord()> run;
  fs::path dir;
};

inline void run_tasks(std::vector<Task>& tasks, std::vector<BatchResult>& out, int parallelism, bool reuse) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto& t = tasks[i];
      try {
        if (reuse && fs::exists(t.dir / "record.json")) {
          out[t.batch].records[t.slot] = load_record(t.dir);
          continue;
        }
        RunRecord r = t.run();
        save_record(t.dir, r);
        out[t.batch].records[t.slot] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline nlohmann::json manifest_json(const PlanResult& result) {
  nlohmann::json batches = nlohmann::json::array();
  for (const auto& b : result.batches) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : b.records) {
      nlohmann::json rj = {{"seed", r.seed},
                           {"status", std::string(to_string(r.status))},
                           {"path", fs::relative(record_dir(result.dir, b.label, r), result.dir).generic_string()}};
      if (r.program_seed) rj["program_seed"] = *r.program_seed;
      runs.push_back(std::move(rj));
    }
    batches.push_back({{"label", b.label},
                       {"env", std::string(envs::to_string(b.env))},
                       {"condition", to_string(b.condition)},
                       {"crossed", b.crossed},
                       {"runs", runs}});
  }
  return {{"artifact_version", kArtifactVersion},
          {"plan_digest", result.digest},
          {"failures", result.failures()},
          {"batches", batches}};
}

// Runs every batch of the plan under out_root/<plan digest>/ and writes the artifacts.
// Throws ContractViolation when a run fails and the plan does not tolerate failures.
inline PlanResult execute_plan(const Plan& plan, const fs::path& out_root, const ExecuteOptions& opts) {
  PlanResult result;
  result.plan = plan;
  result.digest = plan_digest(plan);
  result.dir = out_root / result.digest;
  fs::create_directories(result.dir);
  write_text(result.dir / "plan.json", to_json(plan).dump(2) + "\n");
  if (!plan.sweep.is_null()) write_text(result.dir / "sweep.json", plan.sweep.dump(2) + "\n");

  auto factory_for = [&](envs::EnvId env, const Condition& c) -> generator::ClientFactory {
    if (!c.uses_generator()) return {};
    if (!opts.clients) throw ConfigError("condition " + to_string(c) + " needs a generator client");
    return opts.clients(env);
  };

  auto cache = std::make_shared<Iteration0Cache>();
  std::vector<detail::Task> tasks;
  for (const auto& b : plan.batches) {
    BatchResult br{b.label, b.env, b.condition, false, std::vector<RunRecord>(b.seeds.size())};
    const auto cfg = refinement_for(b);
    const auto factory = factory_for(b.env, b.condition);
    for (std::size_t s = 0; s < b.seeds.size(); ++s) {
      RunRecord probe;
      probe.seed = b.seeds[s];
      const auto env = b.env;
      const auto condition = b.condition;
      const auto seed = b.seeds[s];
      tasks.push_back({result.batches.size(), s,
                       [=] { return run_single(env, condition, seed, factory, cfg, cache.get()); },
                       record_dir(result.dir, b.label, probe)});
    }
    result.batches.push_back(std::move(br));
  }
  for (const auto& c : plan.crossed) {
    Condition one_shot;
    one_shot.kind = Condition::Kind::OneShot;
    BatchResult br{c.label, c.env, one_shot, true, std::vector<RunRecord>(c.rows() * c.train_seeds.size())};
    const auto cfg = refinement_for(c.env, c.refinement, c.train, nlohmann::json::object());
    const auto factory = c.programs.empty() ? factory_for(c.env, one_shot) : generator::ClientFactory{};
    for (std::size_t row = 0; row < c.rows(); ++row) {
      const std::uint64_t pseed = c.programs.empty() ? c.program_seeds[row] : row;
      const std::string literal = c.programs.empty() ? std::string() : c.programs[row];
      for (std::size_t col = 0; col < c.train_seeds.size(); ++col) {
        RunRecord probe;
        probe.seed = c.train_seeds[col];
        probe.program_seed = pseed;
        const auto env = c.env;
        const auto seed = c.train_seeds[col];
        tasks.push_back({result.batches.size(), row * c.train_seeds.size() + col,
                         [=] {
                           RunRecord r;
                           r.condition = one_shot;
                           r.env = env;
                           r.seed = seed;
                           r.program_seed = pseed;
                           return detail::guarded(std::move(r), [&](RunRecord& rec) {
                             IterationRecord it;
                             if (literal.empty()) {
                               auto client = factory();
                               it = detail::initial_program(env, *client, cfg, pseed, cache.get());
                             } else {
                               it.program_text = dsl::print(dsl::parse(literal));
                             }
                             rec.iterations.push_back(std::move(it));
                             rec.final_program_text = rec.iterations.back().program_text;
                             const auto program = dsl::parse(rec.final_program_text);
                             detail::finish(rec, &program, cfg, cfg.full_episodes);
                           });
                         },
                         record_dir(result.dir, c.label, probe)});
      }
    }
    result.batches.push_back(std::move(br));
  }

  detail::run_tasks(tasks, result.batches, opts.parallelism, opts.reuse_existing);
  write_text(result.dir / "manifest.json", manifest_json(result).dump(2) + "\n");
  if (!plan.tolerate_failures && result.failures() > 0) {
    std::string what;
    for (const auto& b : result.batches)
      for (const auto& r : b.records)
        if (r.status != RunStatus::Ok)
          what += "\n  " + b.label + " seed " + std::to_string(r.seed) + ": " + std::string(to_string(r.status)) +
                  (r.error.empty() ? "" : " (" + r.error + ")");
    throw ContractViolation(std::to_string(result.failures()) + " run(s) failed" + what);
  }
  return result;
}

// Reads a run directory back. Runs that were never written are reported in `missing`.
struct LoadedRun {
  PlanResult result;
  std::vector<std::string> missing;
};

inline LoadedRun load_run_dir(const fs::path& dir) {
  LoadedRun out;
  nlohmann::json plan_json;
  try {
    plan_json = nlohmann::json::parse(read_text(dir / "plan.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt plan.json in " + dir.string() + ": " + e.what());
  }
  out.result.plan = plan_from_json(plan_json);
  out.result.dir = dir;
  out.result.digest = plan_digest(out.result.plan);
  const auto& plan = out.result.plan;
  auto load_or_note = [&](BatchResult& br, RunRecord key) {
    const auto d = record_dir(dir, br.label, key);
    if (fs::exists(d / "record.json")) br.records.push_back(load_record(d));
    else out.missing.push_back(fs::relative(d, dir).generic_string());
  };
  for (const auto& b : plan.batches) {
    BatchResult br{b.label, b.env, b.condition, false, {}};
    for (auto seed : b.seeds) {
      RunRecord key;
      key.seed = seed;
      load_or_note(br, key);
    }
    out.result.batches.push_back(std::move(br));
  }
  for (const auto& c : plan.crossed) {
    Condition one_shot;
    one_shot.kind = Condition::Kind::OneShot;
    BatchResult br{c.label, c.env, one_shot, true, {}};
    for (std::size_t row = 0; row < c.rows(); ++row)
      for (auto seed : c.train_seeds) {
        RunRecord key;
        key.seed = seed;
        key.program_seed = c.programs.empty() ? c.program_seeds[row] : row;
        load_or_note(br, key);
      }
    out.result.batches.push_back(std::move(br));
  }
  return out;
}

}  // namespace rewardlab::orchestrator
