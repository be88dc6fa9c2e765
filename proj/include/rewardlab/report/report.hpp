#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/analytics/stats.hpp"
#include "rewardlab/analytics/summary.hpp"
#include "rewardlab/analytics/variance.hpp"
#include "rewardlab/orchestrator/run_dir.hpp"
#include "rewardlab/report/svg.hpp"

namespace rewardlab::report {

namespace fs = std::filesystem;

inline constexpr std::uint64_t kBootstrapSeed = 20240;

struct SummaryRow {
  std::string label;
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::string condition;
  analytics::BatchSummary summary;
  int planned = 0;
  int failed = 0;   // status other than ok
  int missing = 0;  // never written to disk
};

struct TestRow {
  std::string a, b;
  std::string family;  // "grid" or "continuous"
  std::optional<analytics::TestResult> result;  // unset when either side has < 2 values
  double p_corr = std::nan("");
  bool reject = false;
};

struct MissingCell {
  std::uint64_t program_seed;
  std::uint64_t seed;
};

struct DecompositionRow {
  std::string label;
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::vector<std::uint64_t> program_seeds;
  std::vector<std::uint64_t> train_seeds;
  std::vector<MissingCell> missing;
  std::optional<analytics::CrossedDecomposition> crossed;
  std::optional<analytics::AnchoredDecomposition> anchored;
  std::string anchor_batch;
};

struct Report {
  std::string plan_name;
  std::string digest;
  std::vector<SummaryRow> summary;
  std::vector<TestRow> tests;
  std::vector<DecompositionRow> decompositions;
  std::vector<std::string> gaps;  // human-readable notes on missing or failed runs
};

inline std::string number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string percent(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

inline std::string fixed(double v, int digits = 3) {
  if (!std::isfinite(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

namespace detail {

inline const orchestrator::BatchResult* find_batch(const orchestrator::PlanResult& r, const std::string& label) {
  return r.find(label);
}

inline std::vector<orchestrator::RunRecord> completed(const orchestrator::BatchResult& b) {
  std::vector<orchestrator::RunRecord> out;
  for (const auto& r : b.records)
    if (r.status == orchestrator::RunStatus::Ok && r.final_log && !r.final_log->episodes.empty()) out.push_back(r);
  return out;
}

inline std::vector<double> final_values(const orchestrator::BatchResult& b) {
  std::vector<double> out;
  for (const auto& r : completed(b)) out.push_back(analytics::final_metric(r.env, r.final_log->episodes));
  return out;
}

}  // namespace detail

// Crossed table, anchored estimates, and the cells that are missing.
inline DecompositionRow decompose(const orchestrator::PlanResult& result, const orchestrator::CrossedBatch& c,
                                  const std::optional<analytics::BootstrapSpec>& spec) {
  DecompositionRow row;
  row.label = c.label;
  row.env = c.env;
  row.train_seeds = c.train_seeds;
  row.anchor_batch = c.anchor_batch;
  for (std::size_t i = 0; i < c.rows(); ++i)
    row.program_seeds.push_back(c.programs.empty() ? c.program_seeds[i] : static_cast<std::uint64_t>(i));
  const auto* batch = detail::find_batch(result, c.label);
  analytics::Table table(row.program_seeds.size(), row.train_seeds.size());
  for (std::size_t i = 0; i < row.program_seeds.size(); ++i)
    for (std::size_t k = 0; k < row.train_seeds.size(); ++k) {
      const orchestrator::RunRecord* cell = nullptr;
      if (batch)
        for (const auto& r : batch->records)
          if (r.program_seed == row.program_seeds[i] && r.seed == row.train_seeds[k] &&
              r.status == orchestrator::RunStatus::Ok && r.final_log && !r.final_log->episodes.empty())
            cell = &r;
      if (cell) {
        table(i, k) = analytics::final_metric(c.env, cell->final_log->episodes);
      } else {
        table(i, k) = std::nan("");
        row.missing.push_back({row.program_seeds[i], row.train_seeds[k]});
      }
    }
  if (!row.missing.empty()) return row;
  row.crossed = analytics::crossed_anova(table, spec);
  if (!c.anchor_batch.empty()) {
    const auto* main = detail::find_batch(result, c.anchor_batch);
    const auto main_values = main ? detail::final_values(*main) : std::vector<double>{};
    if (main_values.size() >= 2) {
      std::vector<double> fixed_program(table.row(0).begin(), table.row(0).end());
      std::vector<double> fixed_seed(table.col(0).begin(), table.col(0).end());
      row.anchored = analytics::anchored_decomposition(fixed_program, fixed_seed, main_values, spec);
    }
  }
  return row;
}

inline Report build_report(const orchestrator::PlanResult& result, const std::vector<std::string>& missing_runs = {},
                           const analytics::BootstrapSpec& spec = {2000, kBootstrapSeed, 0.95}) {
  Report rep;
  rep.plan_name = result.plan.name;
  rep.digest = result.digest;
  for (const auto& m : missing_runs) rep.gaps.push_back("missing run: " + m);
  for (const auto& b : result.plan.batches) {
    SummaryRow row;
    row.label = b.label;
    row.env = b.env;
    row.condition = orchestrator::to_string(b.condition);
    row.planned = static_cast<int>(b.seeds.size());
    const auto* br = detail::find_batch(result, b.label);
    std::vector<orchestrator::RunRecord> done;
    if (br) {
      for (const auto& r : br->records)
        if (r.status != orchestrator::RunStatus::Ok) {
          ++row.failed;
          rep.gaps.push_back("failed run: " + b.label + " seed " + std::to_string(r.seed) + " (" +
                             std::string(orchestrator::to_string(r.status)) + ")");
        }
      done = detail::completed(*br);
      row.missing = row.planned - static_cast<int>(br->records.size());
    } else {
      row.missing = row.planned;
    }
    if (!done.empty()) row.summary = analytics::summarize_batch(done);
    else {
      row.summary.env = b.env;
      row.summary.metric = analytics::uses_success_metric(b.env) ? "success_rate" : "return";
      row.summary.mean = row.summary.std = std::nan("");
    }
    rep.summary.push_back(std::move(row));
  }

  // Planned comparisons; Holm families split grid tasks from continuous tasks.
  std::map<std::string, std::vector<std::size_t>> families;
  for (const auto& cmp : result.plan.comparisons) {
    TestRow t;
    t.a = cmp.a;
    t.b = cmp.b;
    const auto* a = detail::find_batch(result, cmp.a);
    const auto* b = detail::find_batch(result, cmp.b);
    const auto env = a ? a->env : envs::EnvId::DoorKey5;
    t.family = envs::is_grid(env) ? "grid" : "continuous";
    const auto va = a ? detail::final_values(*a) : std::vector<double>{};
    const auto vb = b ? detail::final_values(*b) : std::vector<double>{};
    if (va.size() >= 2 && vb.size() >= 2) {
      t.result = analytics::welch_test(va, vb);
      families[t.family].push_back(rep.tests.size());
    } else {
      rep.gaps.push_back("comparison " + cmp.a + " vs " + cmp.b + " skipped: fewer than 2 completed runs per side");
    }
    rep.tests.push_back(std::move(t));
  }
  for (const auto& [name, idx] : families) {
    std::vector<double> ps;
    for (auto i : idx) ps.push_back(rep.tests[i].result->p);
    const auto holm = analytics::holm_bonferroni(ps);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      rep.tests[idx[k]].p_corr = holm.adjusted[k];
      rep.tests[idx[k]].reject = holm.reject[k];
    }
  }

  for (const auto& c : result.plan.crossed) {
    auto d = decompose(result, c, spec);
    for (const auto& m : d.missing)
      rep.gaps.push_back("crossed " + c.label + " missing cell (program " + std::to_string(m.program_seed) +
                         ", seed " + std::to_string(m.seed) + ")");
    rep.decompositions.push_back(std::move(d));
  }
  return rep;
}

inline std::string summary_csv(const Report& rep) {
  std::string out = "label,env,condition,metric,n,mean,std,planned,failed,missing\n";
  for (const auto& r : rep.summary)
    out += r.label + "," + std::string(envs::to_string(r.env)) + "," + r.condition + "," + r.summary.metric + "," +
           std::to_string(r.summary.n) + "," + number(r.summary.mean) + "," + number(r.summary.std) + "," +
           std::to_string(r.planned) + "," + std::to_string(r.failed) + "," + std::to_string(r.missing) + "\n";
  return out;
}

inline std::string tests_csv(const Report& rep) {
  std::string out = "comparison,family,delta,t,df,p,p_corr,d,n_a,n_b,reject\n";
  for (const auto& t : rep.tests) {
    const double nan = std::nan("");
    const auto& r = t.result;
    out += t.a + " vs " + t.b + "," + t.family + "," + number(r ? r->delta : nan) + "," + number(r ? r->t : nan) + "," +
           number(r ? r->df : nan) + "," + number(r ? r->p : nan) + "," + number(t.p_corr) + "," +
           number(r ? r->cohens_d : nan) + "," + (r ? std::to_string(r->n_a) : "NA") + "," +
           (r ? std::to_string(r->n_b) : "NA") + "," + (r ? (t.reject ? "true" : "false") : "NA") + "\n";
  }
  return out;
}

inline nlohmann::json interval_json(const std::optional<analytics::Interval>& ci) {
  if (!ci) return nlohmann::json(nullptr);
  return {{"lo", ci->lo}, {"hi", ci->hi}, {"resamples", ci->resamples}, {"draws", ci->draws}};
}

inline nlohmann::json to_json(const DecompositionRow& d) {
  nlohmann::json j = {{"label", d.label},
                      {"env", std::string(envs::to_string(d.env))},
                      {"program_seeds", d.program_seeds},
                      {"train_seeds", d.train_seeds},
                      {"complete", d.missing.empty()}};
  nlohmann::json missing = nlohmann::json::array();
  for (const auto& m : d.missing) missing.push_back({{"program_seed", m.program_seed}, {"seed", m.seed}});
  j["missing"] = missing;
  if (d.crossed) {
    const auto& c = *d.crossed;
    nlohmann::json table = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.table.rows(); ++i) {
      std::vector<double> row(c.table.row(i).begin(), c.table.row(i).end());
      table.push_back(row);
    }
    j["crossed"] = {{"table", table},
                    {"mean_squares", {{"rows", c.ms.rows}, {"cols", c.ms.cols}, {"err", c.ms.err}}},
                    {"components", {{"llm", c.var_llm}, {"rl", c.var_rl}, {"residual", c.var_residual}}},
                    {"shares", {{"llm", c.shares.llm}, {"rl", c.shares.rl}, {"residual", c.shares.residual}}},
                    {"degenerate", c.degenerate},
                    {"ci", {{"llm", interval_json(c.ci_llm)},
                            {"rl", interval_json(c.ci_rl)},
                            {"residual", interval_json(c.ci_residual)}}}};
  }
  if (d.anchored) {
    const auto& a = *d.anchored;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    j["anchored"] = {{"anchor_batch", d.anchor_batch},
                     {"rl_std", a.rl_std},
                     {"llm_std", a.llm_std},
                     {"total_variance", a.total_variance},
                     {"rl_ratio", opt(a.rl_ratio)},
                     {"llm_ratio", opt(a.llm_ratio)},
                     {"ci", {{"rl_std", interval_json(a.ci_rl_std)}, {"llm_std", interval_json(a.ci_llm_std)}}}};
  }
  return j;
}

inline nlohmann::json decomposition_json(const Report& rep) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : rep.decompositions) out.push_back(to_json(d));
  return {{"plan_digest", rep.digest}, {"decompositions", out}};
}

inline std::string curves_file(envs::EnvId env) { return "curves_" + std::string(envs::to_string(env)) + ".svg"; }

// One chart per environment over its condition batches.
inline std::map<std::string, std::string> curve_svgs(const Report& rep) {
  std::map<envs::EnvId, std::vector<Series>> by_env;
  for (const auto& r : rep.summary)
    if (!r.summary.curve_mean.empty())
      by_env[r.env].push_back({r.label, r.summary.curve_mean, r.summary.curve_std});
  std::map<std::string, std::string> out;
  for (const auto& [env, series] : by_env) {
    const std::string y =
        analytics::uses_success_metric(env) ? "success rate (smoothed)" : "episode return (smoothed)";
    out[curves_file(env)] = line_chart(std::string(envs::to_string(env)), "episode", y, series);
  }
  return out;
}

inline std::string markdown(const Report& rep) {
  std::string md = "# Report: " + rep.plan_name + "\n\nPlan digest `" + rep.digest + "`.\n\n";
  md += "## Final performance\n\nFinal-100-episode success rate (tasks with a success signal) or mean raw return, "
        "mean and sample std over runs.\n\n";
  md += "| batch | env | condition | metric | n | mean | std |\n|---|---|---|---|---|---|---|\n";
  for (const auto& r : rep.summary)
    md += "| " + r.label + " | " + std::string(envs::to_string(r.env)) + " | " + r.condition + " | " + r.summary.metric +
          " | " + std::to_string(r.summary.n) + (r.summary.n == 1 ? " (std undefined)" : "") + " | " +
          fixed(r.summary.mean) + " | " + fixed(r.summary.std) + " |\n";
  if (!rep.tests.empty()) {
    md += "\n## Comparisons\n\nWelch t-tests; Holm correction within each family.\n\n";
    md += "| comparison | family | delta | p | p (Holm) | d |\n|---|---|---|---|---|---|\n";
    for (const auto& t : rep.tests) {
      const auto& r = t.result;
      md += "| " + t.a + " vs " + t.b + " | " + t.family + " | " + (r ? fixed(r->delta) : "NA") + " | " +
            (r ? fixed(r->p, 4) : "NA") + " | " + fixed(t.p_corr, 4) + " | " + (r ? fixed(r->cohens_d, 2) : "NA") +
            " |\n";
    }
  }
  for (const auto& d : rep.decompositions) {
    md += "\n## Variance decomposition: " + d.label + "\n\n";
    if (!d.crossed) {
      md += "Incomplete table: " + std::to_string(d.missing.size()) + " missing cell(s).\n";
      continue;
    }
    const auto& c = *d.crossed;
    auto ci = [](const std::optional<analytics::Interval>& i) {
      return i ? "[" + percent(i->lo) + ", " + percent(i->hi) + "]" : std::string("n/a");
    };
    md += std::to_string(c.table.rows()) + " programs x " + std::to_string(c.table.cols()) + " training seeds.\n\n";
    md += "| component | share | 95% CI |\n|---|---|---|\n";
    md += "| LLM | " + percent(c.shares.llm) + " | " + ci(c.ci_llm) + " |\n";
    md += "| RL | " + percent(c.shares.rl) + " | " + ci(c.ci_rl) + " |\n";
    md += "| residual | " + percent(c.shares.residual) + " | " + ci(c.ci_residual) + " |\n";
    if (c.degenerate) md += "\nAll cells are equal; shares are not defined.\n";
    if (d.anchored) {
      const auto& a = *d.anchored;
      auto ratio = [](const std::optional<double>& v) { return v ? percent(*v) : std::string("n/a"); };
      md += "\nSingle-anchor estimates (first program row, first seed column; not orthogonal, ratios to the "
            "variance of `" + d.anchor_batch + "`):\n\n";
      md += "| term | std | ratio |\n|---|---|---|\n";
      md += "| RL (fixed program) | " + fixed(a.rl_std) + " | " + ratio(a.rl_ratio) + " |\n";
      md += "| LLM (fixed seed) | " + fixed(a.llm_std) + " | " + ratio(a.llm_ratio) + " |\n";
    }
  }
  const auto svgs = curve_svgs(rep);
  if (!svgs.empty()) {
    md += "\n## Learning curves\n\n";
    for (const auto& [file, _] : svgs) md += "![" + file + "](" + file + ")\n";
  }
  if (!rep.gaps.empty()) {
    md += "\n## Gaps\n\n";
    for (const auto& g : rep.gaps) md += "- " + g + "\n";
  }
  return md;
}

inline std::vector<std::string> write_report(const Report& rep, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> files = {"summary.csv", "tests.csv", "decomposition.json", "report.md"};
  orchestrator::write_text(out_dir / "summary.csv", summary_csv(rep));
  orchestrator::write_text(out_dir / "tests.csv", tests_csv(rep));
  orchestrator::write_text(out_dir / "decomposition.json", decomposition_json(rep).dump(2) + "\n");
  orchestrator::write_text(out_dir / "report.md", markdown(rep));
  for (const auto& [file, svg] : curve_svgs(rep)) {
    orchestrator::write_text(out_dir / file, svg);
    files.push_back(file);
  }
  return files;
}

}  // namespace rewardlab::report
