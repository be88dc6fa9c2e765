#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "rewardlab/diagnostics.hpp"
#include "rewardlab/dsl/parser.hpp"
#include "rewardlab/envs/specs.hpp"
#include "rewardlab/generator/client.hpp"
#include "rewardlab/generator/generate.hpp"
#include "rewardlab/generator/prompts.hpp"
#include "rewardlab/orchestrator/condition.hpp"
#include "rewardlab/orchestrator/handcrafted.hpp"
#include "rewardlab/orchestrator/run_record.hpp"
#include "rewardlab/ppo/trainer.hpp"

namespace rewardlab::orchestrator {

inline constexpr std::array<std::uint64_t, 10> kDefaultSeeds = {42, 123, 456, 789, 1024, 2048, 3141, 4096, 5555, 7777};

struct RefinementConfig {
  double tau = 0.95;
  int max_iterations = 3;
  int probe_episodes = 500;
  int full_episodes = 3000;  // 0 skips the final training run
  generator::PromptMode prompt_mode = generator::PromptMode::RefineFull;
  diagnostics::DiagnosticConfig diagnostics;
  // Dense environments use return-trend diagnostics unless this is set.
  bool force_sparse = false;
  generator::RetryPolicy retry;
  ppo::TrainConfig train;
  int eval_window = 100;

  long budget() const { return static_cast<long>(max_iterations) * probe_episodes + full_episodes; }
};

inline RefinementConfig default_refinement(envs::EnvId env) {
  RefinementConfig c;
  c.train = ppo::default_config(env);
  if (!envs::is_grid(env)) {
    c.probe_episodes = 200;
    c.full_episodes = 1000;
  }
  return c;
}

// Iteration-0 programs keyed by (env, seed), so refinement variants can share them.
class Iteration0Cache {
 public:
  std::optional<generator::GenerationResult> get(envs::EnvId env, std::uint64_t seed) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find({env, seed});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  void put(envs::EnvId env, std::uint64_t seed, const generator::GenerationResult& r) {
    std::lock_guard lock(mu_);
    entries_.emplace(std::make_pair(env, seed), r);
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::pair<envs::EnvId, std::uint64_t>, generator::GenerationResult> entries_;
};

namespace detail {

inline ppo::TrainRunLog train_for(envs::EnvId env, const dsl::RewardProgram* program, ppo::TrainConfig cfg,
                                  std::uint64_t seed, int episodes) {
  cfg.episodes = episodes;
  return ppo::train(env, program, cfg, seed);
}

// Dense environments pair return-trend diagnostics with the dense prompt.
inline std::pair<diagnostics::DiagnosticConfig, generator::PromptMode> effective_modes(envs::EnvId env,
                                                                                       const RefinementConfig& cfg) {
  auto diag = cfg.diagnostics;
  auto mode = cfg.prompt_mode;
  if (envs::kind_of(env) == envs::EnvKind::Dense && !cfg.force_sparse) {
    diag.mode = diagnostics::Mode::Dense;
    mode = generator::PromptMode::RefineDense;
  } else {
    diag.mode = diagnostics::Mode::Sparse;
    if (mode == generator::PromptMode::RefineDense) mode = generator::PromptMode::RefineFull;
  }
  return {diag, mode};
}

inline IterationRecord from_generation(const generator::GenerationResult& g, bool cached) {
  IterationRecord it;
  it.program_text = g.program_text;
  if (!cached) it.attempts = g.transcript;
  it.from_cache = cached;
  return it;
}

inline IterationRecord initial_program(envs::EnvId env, generator::GeneratorClient& client,
                                       const RefinementConfig& cfg, std::uint64_t seed, Iteration0Cache* cache) {
  if (cache)
    if (auto hit = cache->get(env, seed)) return from_generation(*hit, true);
  const auto spec = envs::env_spec(env);
  const auto g =
      generator::generate_program(client, generator::build_generation_prompt(spec), cfg.retry, spec.kind);
  if (cache) cache->put(env, seed, g);
  return from_generation(g, false);
}

inline void finish(RunRecord& r, const dsl::RewardProgram* program, const RefinementConfig& cfg, int episodes,
                   double rnd_coef = 0.0) {
  if (episodes <= 0) return;
  auto train_cfg = cfg.train;
  train_cfg.rnd_coef = rnd_coef > 0.0 ? rnd_coef : train_cfg.rnd_coef;
  r.final_log = train_for(r.env, program, train_cfg, r.seed, episodes);
  r.final_metrics = ppo::evaluate_final(*r.final_log, cfg.eval_window);
  r.total_episodes_used += episodes;
}

// Runs body, mapping generation and training failures onto the record status.
template <typename Body>
RunRecord guarded(RunRecord r, Body&& body) {
  try {
    body(r);
  } catch (const generator::GenerationFailed& e) {
    r.status = RunStatus::GenerationFailed;
    r.error = e.what();
    r.failed_generations.push_back(e.attempts());
  } catch (const TrainingAborted& e) {
    r.status = RunStatus::TrainingAborted;
    r.error = e.what();
  }
  return r;
}

}  // namespace detail

// Generate, then up to K probe/diagnose/refine rounds, then a fresh full run with the last program.
inline RunRecord run_iterative(envs::EnvId env, generator::GeneratorClient& client, const RefinementConfig& cfg,
                               std::uint64_t seed, Iteration0Cache* cache = nullptr) {
  require(cfg.max_iterations >= 0 && cfg.probe_episodes > 0 && cfg.full_episodes >= 0, "bad refinement config");
  const auto [diag_cfg, mode] = detail::effective_modes(env, cfg);
  RunRecord r;
  r.condition.kind = Condition::Kind::Iterative;
  r.condition.prompt_mode = mode;
  r.env = env;
  r.seed = seed;
  const auto spec = envs::env_spec(env);
  return detail::guarded(std::move(r), [&](RunRecord& rec) {
    rec.iterations.push_back(detail::initial_program(env, client, cfg, seed, cache));
    for (int k = 0; k < cfg.max_iterations; ++k) {
      auto& it = rec.iterations.back();
      const auto program = dsl::parse(it.program_text);
      const auto log = detail::train_for(env, &program, cfg.train, seed, cfg.probe_episodes);
      rec.total_episodes_used += cfg.probe_episodes;
      it.probe = ppo::evaluate_final(log, cfg.eval_window);
      it.probe_episodes = log.episodes;
      if (spec.has_binary_success && it.probe->success_rate >= cfg.tau) break;
      it.diagnosis = diagnostics::diagnose(log.episodes, *it.probe, diag_cfg);
      std::optional<diagnostics::ReturnTrend> trend;
      if (diag_cfg.mode == diagnostics::Mode::Dense) {
        std::vector<double> returns;
        for (const auto& e : log.episodes) returns.push_back(e.shaped_return);
        trend = diagnostics::return_trend(returns);
      }
      const auto prompt =
          generator::build_refinement_prompt(spec, it.program_text, *it.probe, *it.diagnosis, mode, trend);
      const auto g = generator::generate_program(client, prompt, cfg.retry, spec.kind);
      rec.iterations.push_back(detail::from_generation(g, false));
    }
    rec.final_program_text = rec.iterations.back().program_text;
    const auto program = dsl::parse(rec.final_program_text);
    detail::finish(rec, &program, cfg, cfg.full_episodes);
  });
}

inline RunRecord run_one_shot(envs::EnvId env, generator::GeneratorClient& client, const RefinementConfig& cfg,
                              std::uint64_t seed, bool extended = false, Iteration0Cache* cache = nullptr) {
  RunRecord r;
  r.condition.kind = extended ? Condition::Kind::OneShotExtended : Condition::Kind::OneShot;
  r.env = env;
  r.seed = seed;
  return detail::guarded(std::move(r), [&](RunRecord& rec) {
    rec.iterations.push_back(detail::initial_program(env, client, cfg, seed, cache));
    rec.final_program_text = rec.iterations.back().program_text;
    const auto program = dsl::parse(rec.final_program_text);
    detail::finish(rec, &program, cfg, extended ? static_cast<int>(cfg.budget()) : cfg.full_episodes);
  });
}

// n independent generations; each valid candidate is probed; the best probe
// (sr, then mr, then lowest index) is trained in full.
inline RunRecord run_best_of_n(envs::EnvId env, generator::GeneratorClient& client, int n,
                               const RefinementConfig& cfg, std::uint64_t seed) {
  require(n >= 1, "best-of-n needs n >= 1");
  RunRecord r;
  r.condition.kind = Condition::Kind::BestOfN;
  r.condition.n = n;
  r.env = env;
  r.seed = seed;
  const auto spec = envs::env_spec(env);
  return detail::guarded(std::move(r), [&](RunRecord& rec) {
    const auto prompt = generator::build_generation_prompt(spec);
    std::vector<int> candidate_index;  // position in iterations -> candidate number
    for (int c = 0; c < n; ++c) {
      try {
        const auto g = generator::generate_program(client, prompt, cfg.retry, spec.kind);
        rec.iterations.push_back(detail::from_generation(g, false));
        candidate_index.push_back(c);
      } catch (const generator::GenerationFailed& e) {
        rec.failed_generations.push_back(e.attempts());
      }
    }
    if (rec.iterations.empty()) {
      auto last = std::move(rec.failed_generations.back());
      rec.failed_generations.pop_back();
      throw generator::GenerationFailed(std::move(last));
    }
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rec.iterations.size(); ++i) {
      auto& it = rec.iterations[i];
      const auto program = dsl::parse(it.program_text);
      const auto log = detail::train_for(env, &program, cfg.train, seed, cfg.probe_episodes);
      rec.total_episodes_used += cfg.probe_episodes;
      it.probe = ppo::evaluate_final(log, cfg.eval_window);
      it.probe_episodes = log.episodes;
      if (!best) {
        best = i;
        continue;
      }
      const auto& b = *rec.iterations[*best].probe;
      const auto& p = *it.probe;
      if (p.success_rate > b.success_rate || (p.success_rate == b.success_rate && p.mean_reward > b.mean_reward))
        best = i;
    }
    rec.winner = candidate_index[*best];
    rec.final_program_text = rec.iterations[*best].program_text;
    const auto program = dsl::parse(rec.final_program_text);
    detail::finish(rec, &program, cfg, cfg.full_episodes);
  });
}

// Conditions that need no generator.
inline RunRecord run_fixed(envs::EnvId env, const Condition& condition, const RefinementConfig& cfg,
                           std::uint64_t seed) {
  using K = Condition::Kind;
  RunRecord r;
  r.condition = condition;
  r.env = env;
  r.seed = seed;
  return detail::guarded(std::move(r), [&](RunRecord& rec) {
    switch (condition.kind) {
      case K::NoShaping: detail::finish(rec, nullptr, cfg, cfg.full_episodes); break;
      case K::NoShapingExtended: detail::finish(rec, nullptr, cfg, static_cast<int>(cfg.budget())); break;
      case K::Rnd: detail::finish(rec, nullptr, cfg, cfg.full_episodes, condition.rnd_coef); break;
      case K::HandCrafted: {
        const auto program = dsl::parse(handcrafted_program(env));
        rec.final_program_text = dsl::print(program);
        detail::finish(rec, &program, cfg, cfg.full_episodes);
        break;
      }
      default: throw ContractViolation("condition " + to_string(condition) + " needs a generator");
    }
  });
}

inline RunRecord run_single(envs::EnvId env, const Condition& condition, std::uint64_t seed,
                            const generator::ClientFactory& make_client, const RefinementConfig& cfg,
                            Iteration0Cache* cache = nullptr) {
  using K = Condition::Kind;
  if (!condition.uses_generator()) return run_fixed(env, condition, cfg, seed);
  require(static_cast<bool>(make_client), "condition " + to_string(condition) + " needs a generator client");
  auto client = make_client();
  switch (condition.kind) {
    case K::OneShot: return run_one_shot(env, *client, cfg, seed, false, cache);
    case K::OneShotExtended: return run_one_shot(env, *client, cfg, seed, true, cache);
    case K::BestOfN: return run_best_of_n(env, *client, condition.n, cfg, seed);
    default: {
      auto c = cfg;
      c.prompt_mode = condition.prompt_mode;
      return run_iterative(env, *client, c, seed, cache);
    }
  }
}

struct RunOptions {
  int parallelism = 1;
  Iteration0Cache* cache = nullptr;
};

// One record per seed, in seed order. Runs share no mutable state beyond the cache.
inline std::vector<RunRecord> run_condition(envs::EnvId env, const Condition& condition,
                                            const std::vector<std::uint64_t>& seeds,
                                            const generator::ClientFactory& make_client, const RefinementConfig& cfg,
                                            const RunOptions& opts = {}) {
  std::vector<std::optional<RunRecord>> out(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = run_single(env, condition, seeds[i], make_client, cfg, opts.cache);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(opts.parallelism, static_cast<int>(seeds.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<RunRecord> records;
  for (auto& r : out) records.push_back(std::move(*r));
  return records;
}

}  // namespace rewardlab::orchestrator
