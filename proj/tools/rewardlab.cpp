// rewardlab command-line entry point.
//
// Exit codes: 0 ok, 1 runtime failure, 2 invalid plan or arguments,
// 3 provider credentials missing, 4 incomplete crossed table.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rewardlab/analytics.hpp"
#include "rewardlab/dsl.hpp"
#include "rewardlab/generator.hpp"
#include "rewardlab/generator/http_client.hpp"
#include "rewardlab/orchestrator.hpp"
#include "rewardlab/report/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rewardlab;

enum Exit : int { kOk = 0, kFailure = 1, kInvalid = 2, kAuth = 3, kIncomplete = 4 };

// "scripted:<scenario>" or "http:<config.json>" ("http" alone uses provider defaults).
orchestrator::ClientProvider make_clients(const std::string& spec) {
  if (spec.empty()) return {};
  if (spec.rfind("scripted:", 0) == 0) {
    const std::string scenario = spec.substr(9);
    generator::scripted_scenario(scenario, envs::EnvKind::Grid);  // rejects unknown names early
    return [scenario](envs::EnvId env) { return generator::scripted_factory(scenario, envs::kind_of(env)); };
  }
  if (spec == "http" || spec.rfind("http:", 0) == 0) {
    const auto config = spec == "http" ? generator::ProviderConfig{} : generator::load_provider_config(spec.substr(5));
    auto factory = generator::http_factory(config);
    return [factory](envs::EnvId) { return factory; };
  }
  throw ConfigError("client must be scripted:<scenario> or http[:<config.json>], got '" + spec + "'");
}

bool plan_needs_client(const orchestrator::Plan& plan) {
  for (const auto& b : plan.batches)
    if (b.condition.uses_generator()) return true;
  for (const auto& c : plan.crossed)
    if (c.programs.empty()) return true;
  return false;
}

int execute(orchestrator::Plan plan, const std::string& out, int parallelism, const std::string& client) {
  if (const char* seeds = std::getenv("REWARDLAB_SEED_LIST"); seeds && *seeds)
    orchestrator::override_seeds(plan, orchestrator::parse_seed_list(seeds));
  orchestrator::ExecuteOptions opts;
  opts.parallelism = parallelism;
  const std::string spec = client.empty() ? plan.client : client;
  if (plan_needs_client(plan)) opts.clients = make_clients(spec);
  const auto result = orchestrator::execute_plan(plan, out, opts);
  std::cout << result.dir.string() << "\n";
  if (result.failures() > 0)
    std::cerr << result.failures() << " run(s) failed; tolerated by the plan\n";
  return kOk;
}

int cmd_report(const std::string& run_dir, std::string out) {
  const auto loaded = orchestrator::load_run_dir(run_dir);
  const auto rep = report::build_report(loaded.result, loaded.missing);
  if (out.empty()) out = (fs::path(run_dir) / "report").string();
  for (const auto& f : report::write_report(rep, out)) std::cout << (fs::path(out) / f).string() << "\n";
  for (const auto& g : rep.gaps) std::cerr << "gap: " << g << "\n";
  return kOk;
}

int cmd_decompose(const std::string& run_dir, std::string out) {
  const auto loaded = orchestrator::load_run_dir(run_dir);
  const auto& plan = loaded.result.plan;
  if (plan.crossed.empty()) throw ConfigError("plan has no crossed batch");
  report::Report rep;
  rep.plan_name = plan.name;
  rep.digest = loaded.result.digest;
  bool incomplete = false;
  for (const auto& c : plan.crossed) {
    auto row = report::decompose(loaded.result, c, analytics::BootstrapSpec{2000, report::kBootstrapSeed, 0.95});
    for (const auto& m : row.missing) {
      std::cerr << "missing cell: " << c.label << " program " << m.program_seed << " seed " << m.seed << "\n";
      incomplete = true;
    }
    rep.decompositions.push_back(std::move(row));
  }
  if (incomplete) return kIncomplete;
  if (out.empty()) out = run_dir;
  orchestrator::write_text(fs::path(out) / "decomposition.json", report::decomposition_json(rep).dump(2) + "\n");
  for (const auto& d : rep.decompositions) {
    const auto& s = d.crossed->shares;
    std::cout << d.label << ": llm " << report::percent(s.llm) << ", rl " << report::percent(s.rl) << ", residual "
              << report::percent(s.residual) << (d.crossed->degenerate ? " (degenerate)" : "") << "\n";
  }
  std::cout << (fs::path(out) / "decomposition.json").string() << "\n";
  return kOk;
}

std::optional<envs::EnvKind> kind_option(const std::string& env) {
  if (env.empty()) return std::nullopt;
  return envs::kind_of(envs::parse_env_id(env));
}

int cmd_lint(const std::string& path, const std::string& env) {
  const auto rep = dsl::lint(orchestrator::read_text(path), kind_option(env));
  for (const auto& f : rep.findings)
    std::cout << dsl::to_string(f.category) << " " << f.rule_name << ": " << f.message << "\n";
  if (rep.clean()) std::cout << "clean\n";
  return kOk;
}

int cmd_validate(const std::string& path, const std::string& env) {
  const auto rep = dsl::validate(orchestrator::read_text(path), kind_option(env));
  if (rep.ok) {
    std::cout << "ok\n";
    for (const auto& a : rep.advisories) std::cout << "advisory: " << a << "\n";
    return kOk;
  }
  std::cout << rep.summary();
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-program generation, PPO training and analysis"};
  app.require_subcommand(1);

  std::string plan_path, run_out = "runs", report_out, client, run_dir, sweep_path, program, env;
  int parallelism = 1;

  auto* run = app.add_subcommand("run", "Execute an experiment plan");
  run->add_option("plan", plan_path, "Plan JSON file")->required();
  run->add_option("--out", run_out, "Output root; runs land in <out>/<plan digest>")->capture_default_str();
  run->add_option("--parallelism,-j", parallelism, "Concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--client", client, "scripted:<scenario> or http[:<config.json>] (overrides the plan)");

  auto* sweep = app.add_subcommand("sweep", "Expand a plan along one sweep axis and execute it");
  sweep->add_option("plan", plan_path, "Base plan JSON file")->required();
  sweep->add_option("sweep", sweep_path, "Sweep JSON file")->required();
  sweep->add_option("--out", run_out, "Output root")->capture_default_str();
  sweep->add_option("--parallelism,-j", parallelism, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--client", client, "scripted:<scenario> or http[:<config.json>]");

  auto* report = app.add_subcommand("report", "Summaries, tests, decompositions and curves for a run directory");
  report->add_option("run_dir", run_dir, "Run directory")->required();
  report->add_option("--out", report_out, "Report directory (default <run_dir>/report)");

  auto* decompose = app.add_subcommand("decompose", "Variance decomposition of the crossed batches");
  decompose->add_option("run_dir", run_dir, "Run directory")->required();
  decompose->add_option("--out", report_out, "Directory for decomposition.json (default run_dir)");

  auto* lint = app.add_subcommand("lint", "Static lint of a reward program");
  lint->add_option("program", program, "Program file")->required();
  lint->add_option("--env", env, "Environment id for field checks");

  auto* validate = app.add_subcommand("validate", "Parse, type check and sandbox-check a reward program");
  validate->add_option("program", program, "Program file")->required();
  validate->add_option("--env", env, "Environment id for field checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return execute(orchestrator::load_plan(plan_path), run_out, parallelism, client);
    if (*sweep) {
      const auto base = orchestrator::load_plan(plan_path);
      nlohmann::json sj;
      try {
        sj = nlohmann::json::parse(orchestrator::read_text(sweep_path));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("sweep " + sweep_path + " is not valid JSON: " + e.what());
      }
      return execute(orchestrator::expand_sweep(base, orchestrator::sweep_from_json(sj)), run_out, parallelism, client);
    }
    if (*report) return cmd_report(run_dir, report_out);
    if (*decompose) return cmd_decompose(run_dir, report_out);
    if (*lint) return cmd_lint(program, env);
    if (*validate) return cmd_validate(program, env);
  } catch (const AuthMissing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAuth;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
