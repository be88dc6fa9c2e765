#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "rewardlab/analytics.hpp"
#include "rewardlab/report/report.hpp"
#include "stats_oracle.hpp"

using namespace rewardlab;
using namespace rewardlab::analytics;

namespace {

std::vector<std::vector<double>> to_rows(const Table& t) {
  std::vector<std::vector<double>> rows(t.rows(), std::vector<double>(t.cols()));
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index k = 0; k < t.cols(); ++k) rows[i][k] = t(i, k);
  return rows;
}

Table random_table(Rng& rng, int L, int R) {
  Table t(L, R);
  for (int i = 0; i < L; ++i)
    for (int k = 0; k < R; ++k) t(i, k) = rng.normal();
  return t;
}

orchestrator::RunRecord fake_run(envs::EnvId env, std::uint64_t seed, const std::vector<bool>& successes,
                                 double ret = 0.0) {
  orchestrator::RunRecord r;
  r.env = env;
  r.seed = seed;
  ppo::TrainRunLog log;
  log.env = env;
  log.seed = seed;
  for (bool s : successes) {
    ppo::EpisodeRecord e;
    e.success = s;
    e.raw_return = s ? ret : 0.0;
    e.shaped_return = e.raw_return;
    e.steps = 10;
    log.episodes.push_back(e);
  }
  r.final_log = log;
  return r;
}

}  // namespace

TEST(Welch, MatchesReferenceValues) {
  // Reference values from an independent statistics package.
  const auto r = welch_test({0.1, 0.2, 0.3, 0.4}, {0.3, 0.4, 0.5, 0.6});
  EXPECT_NEAR(r.t, -2.1908902300206643, 1e-9);
  EXPECT_NEAR(r.df, 6.0, 1e-9);
  EXPECT_NEAR(r.p, 0.07098765432098764, 1e-9);
  EXPECT_NEAR(r.delta, -0.2, 1e-12);
  const auto u = welch_test({1.0, 2.5, 3.1, 4.7, 2.2}, {0.4, 0.9, 1.3});
  EXPECT_NEAR(u.t, 2.7804031095457518, 1e-9);
  EXPECT_NEAR(u.df, 5.25538258980236, 1e-9);
  EXPECT_NEAR(u.p, 0.0368353830654683, 1e-9);
}

TEST(Welch, MatchesDirectFormulaOnFixtures) {
  for (const auto& [a, b] : testing_support::welch_fixtures()) {
    const auto r = welch_test(a, b);
    const auto o = testing_support::welch_oracle(a, b);
    EXPECT_NEAR(r.t, o.t, 1e-9);
    EXPECT_NEAR(r.df, o.df, 1e-9);
    EXPECT_NEAR(r.p, o.p, 1e-9);
  }
}

TEST(Welch, DegenerateSamples) {
  const auto same = welch_test({1, 2, 3}, {1, 2, 3});
  EXPECT_DOUBLE_EQ(same.delta, 0.0);
  EXPECT_DOUBLE_EQ(same.p, 1.0);
  const auto flat = welch_test({0.5, 0.5, 0.5}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(flat.p, 1.0);
  EXPECT_DOUBLE_EQ(flat.cohens_d, 0.0);
  const auto separated = welch_test({0, 0, 0}, {1, 1, 1});
  EXPECT_LT(separated.p, 1e-6);
  EXPECT_TRUE(std::isfinite(separated.t));
  EXPECT_THROW(welch_test({1}, {1, 2}), ContractViolation);
}

TEST(Welch, SymmetryAndShiftInvariance) {
  const std::vector<double> a = {0.2, 0.5, 0.4, 0.9}, b = {0.1, 0.3, 0.2, 0.25, 0.15};
  const auto ab = welch_test(a, b), ba = welch_test(b, a);
  EXPECT_NEAR(ab.delta, -ba.delta, 1e-15);
  EXPECT_NEAR(ab.cohens_d, -ba.cohens_d, 1e-15);
  EXPECT_NEAR(ab.p, ba.p, 1e-15);
  auto shifted = [](std::vector<double> x) {
    for (auto& v : x) v += 3.0;
    return x;
  };
  const auto s = welch_test(shifted(a), shifted(b));
  EXPECT_NEAR(s.t, ab.t, 1e-9);
  EXPECT_NEAR(s.p, ab.p, 1e-9);
  // Permuting within a sample changes nothing.
  const auto perm = welch_test({0.9, 0.2, 0.4, 0.5}, b);
  EXPECT_NEAR(perm.t, ab.t, 1e-12);
}

TEST(Welch, CohensDUsesPooledStd) {
  const std::vector<double> a = {1, 2, 3, 4}, b = {2, 4, 6};
  const double pooled = std::sqrt((3 * sample_variance(a) + 2 * sample_variance(b)) / 5.0);
  EXPECT_NEAR(welch_test(a, b).cohens_d, (2.5 - 4.0) / pooled, 1e-12);
}

TEST(Holm, HandComputedTables) {
  const auto one = holm_bonferroni({0.03});
  EXPECT_DOUBLE_EQ(one.adjusted[0], 0.03);
  EXPECT_TRUE(one.reject[0]);
  // Sorted 0.01, 0.03, 0.04 -> 3*0.01, 2*0.03, max(1*0.04, 0.06); reported in input order.
  const auto three = holm_bonferroni({0.01, 0.04, 0.03});
  EXPECT_NEAR(three.adjusted[0], 0.03, 1e-15);
  EXPECT_NEAR(three.adjusted[1], 0.06, 1e-15);
  EXPECT_NEAR(three.adjusted[2], 0.06, 1e-15);
  EXPECT_EQ(three.reject, (std::vector<bool>{true, false, false}));
  const auto five = holm_bonferroni({0.001, 0.2, 0.012, 0.04, 0.015});
  const std::vector<double> expected = {0.005, 0.2, 0.048, 0.08, 0.048};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(five.adjusted[i], expected[i], 1e-15);
  EXPECT_EQ(five.reject, (std::vector<bool>{true, false, true, false, true}));
  const auto ones = holm_bonferroni({1, 1, 1});
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(ones.adjusted[i], 1.0);
    EXPECT_FALSE(ones.reject[i]);
  }
  EXPECT_DOUBLE_EQ(holm_bonferroni({0.4, 0.5}).adjusted[1], 0.8);
  EXPECT_THROW(holm_bonferroni({1.2}), ContractViolation);
}

TEST(Holm, NeverDecreasesAndIsMonotone) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + trial % 9);
    for (auto& v : p) v = rng.uniform() * rng.uniform();
    const auto h = holm_bonferroni(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_GE(h.adjusted[i], p[i]);
      EXPECT_LE(h.adjusted[i], 1.0);
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[i] < p[k]) {
          EXPECT_LE(h.adjusted[i], h.adjusted[k]);
        }
      }
    }
  }
}

TEST(Bootstrap, ConstantDataAndDeterminism) {
  const auto c = bootstrap_mean_ci({2.5, 2.5, 2.5, 2.5});
  EXPECT_DOUBLE_EQ(c.lo, 2.5);
  EXPECT_DOUBLE_EQ(c.hi, 2.5);
  EXPECT_EQ(c.resamples, 2000);
  const std::vector<double> xs = {0.1, 0.4, 0.35, 0.8, 0.2, 0.5};
  const auto a = bootstrap_mean_ci(xs, {2000, 7, 0.95});
  const auto b = bootstrap_mean_ci(xs, {2000, 7, 0.95});
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  const auto other = bootstrap_mean_ci(xs, {2000, 8, 0.95});
  EXPECT_TRUE(other.lo != a.lo || other.hi != a.hi);
  EXPECT_LE(a.lo, mean(xs));
  EXPECT_GE(a.hi, mean(xs));
}

TEST(Bootstrap, UndefinedResamplesAreRedrawnUpToCap) {
  // Statistic undefined unless the resample contains the distinct value.
  const std::vector<double> xs = {0, 0, 0, 1};
  const auto ci = bootstrap_ci(
      xs,
      [](const std::vector<double>& r) -> std::optional<double> {
        double s = 0;
        for (double v : r) s += v;
        if (s == 0) return std::nullopt;
        return s;
      },
      {500, 1, 0.95});
  EXPECT_EQ(ci.resamples, 500);
  EXPECT_GT(ci.draws, 500);
  EXPECT_GE(ci.lo, 1.0);
  // Rarely defined: the interval uses what was collected within 10x resamples draws.
  std::vector<double> sparse(10, 0.0);
  sparse[0] = 1.0;
  const auto capped = bootstrap_ci(
      sparse,
      [](const std::vector<double>& r) -> std::optional<double> {
        double s = 0;
        for (double v : r) s += v;
        if (s < 4) return std::nullopt;
        return s;
      },
      {100, 1, 0.95});
  EXPECT_EQ(capped.draws, 1000);
  EXPECT_LT(capped.resamples, 100);
  EXPECT_GT(capped.resamples, 0);
}

TEST(Bootstrap, NeverDefinedIsAContractViolation) {
  EXPECT_THROW(bootstrap_ci({1, 2}, [](const std::vector<double>&) -> std::optional<double> { return std::nullopt; },
                            {50, 1, 0.95}),
               ContractViolation);
  EXPECT_THROW(bootstrap_mean_ci({}), ContractViolation);
}

TEST(Bootstrap, PercentileQuantile) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.975), 7.0);
}

TEST(Bootstrap, CoverageOfGaussianMean) {
  Rng rng(99);
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(30);
    for (auto& x : xs) x = rng.normal();
    const auto ci = bootstrap_mean_ci(xs, {2000, static_cast<std::uint64_t>(trial), 0.95});
    covered += ci.lo <= 0.0 && 0.0 <= ci.hi;
  }
  EXPECT_GE(covered, 180);
  EXPECT_LE(covered, 198);
}

TEST(Crossed, MatchesSumOfSquaresOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Table t = random_table(rng, 5, 5);
    for (int i = 0; i < 5; ++i) t.row(i).array() += rng.normal(0.0, 1.5);
    const auto d = crossed_anova(t, std::nullopt);
    const auto o = testing_support::anova_oracle(to_rows(t));
    EXPECT_NEAR(d.ms.rows, o.ms_rows, 1e-9);
    EXPECT_NEAR(d.ms.cols, o.ms_cols, 1e-9);
    EXPECT_NEAR(d.ms.err, o.ms_err, 1e-9);
    EXPECT_NEAR(d.shares.llm, o.llm, 1e-9);
    EXPECT_NEAR(d.shares.rl, o.rl, 1e-9);
    EXPECT_NEAR(d.shares.residual, o.residual, 1e-9);
    EXPECT_NEAR(d.shares.llm + d.shares.rl + d.shares.residual, 1.0, 1e-12);
  }
}

TEST(Crossed, StructuredTables) {
  Table rows_equal(3, 4);
  rows_equal << 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(crossed_anova(rows_equal, std::nullopt).shares.llm, 0.0);
  Table pure_row(2, 5);
  pure_row.row(0).setZero();
  pure_row.row(1).setOnes();
  const auto d = crossed_anova(pure_row, std::nullopt);
  EXPECT_DOUBLE_EQ(d.shares.llm, 1.0);
  EXPECT_DOUBLE_EQ(d.shares.residual, 0.0);
  EXPECT_DOUBLE_EQ(d.var_llm, 0.5);
  Table minimal(2, 2);
  minimal << 0.1, 0.3, 0.8, 0.6;
  const auto m = crossed_anova(minimal);
  EXPECT_NEAR(m.shares.llm + m.shares.rl + m.shares.residual, 1.0, 1e-12);
  ASSERT_TRUE(m.ci_llm.has_value());
  EXPECT_LE(m.ci_llm->lo, m.ci_llm->hi);
}

TEST(Crossed, ShiftAndScaleInvariance) {
  Rng rng(3);
  const Table t = random_table(rng, 5, 4);
  const auto base = crossed_anova(t, std::nullopt);
  const auto shifted = crossed_anova((t.array() + 7.0).matrix(), std::nullopt);
  const auto scaled = crossed_anova(t * 3.0, std::nullopt);
  EXPECT_NEAR(shifted.shares.llm, base.shares.llm, 1e-9);
  EXPECT_NEAR(shifted.shares.residual, base.shares.residual, 1e-9);
  EXPECT_NEAR(scaled.var_llm, 9.0 * base.var_llm, 1e-9);
  EXPECT_NEAR(scaled.var_rl, 9.0 * base.var_rl, 1e-9);
  EXPECT_NEAR(scaled.var_residual, 9.0 * base.var_residual, 1e-9);
  EXPECT_NEAR(scaled.shares.rl, base.shares.rl, 1e-9);
}

TEST(Crossed, RecoversSyntheticShares) {
  Rng rng(17);
  double row_llm = 0, noise_res = 0, noise_llm = 0, noise_rl = 0;
  const int draws = 50;
  for (int k = 0; k < draws; ++k) {
    Table row_effect(20, 20), noise(20, 20);
    for (int i = 0; i < 20; ++i) {
      const double effect = rng.normal();
      for (int j = 0; j < 20; ++j) {
        row_effect(i, j) = effect;
        noise(i, j) = rng.normal();
      }
    }
    row_llm += crossed_anova(row_effect, std::nullopt).shares.llm;
    const auto n = crossed_anova(noise, std::nullopt);
    noise_res += n.shares.residual;
    noise_llm += n.shares.llm;
    noise_rl += n.shares.rl;
  }
  EXPECT_NEAR(row_llm / draws, 1.0, 0.05);
  EXPECT_NEAR(noise_res / draws, 1.0, 0.05);
  EXPECT_NEAR(noise_llm / draws, 0.0, 0.05);
  EXPECT_NEAR(noise_rl / draws, 0.0, 0.05);
}

TEST(Crossed, ContractsAndDegenerateTables) {
  Table incomplete(2, 2);
  incomplete << 1, std::nan(""), 0, 1;
  EXPECT_THROW(crossed_anova(incomplete), ContractViolation);
  EXPECT_THROW(crossed_anova(Table::Ones(1, 3)), ContractViolation);
  const auto flat = crossed_anova(Table::Constant(3, 3, 0.7));
  EXPECT_TRUE(flat.degenerate);
  EXPECT_FALSE(flat.ci_llm.has_value());
}

TEST(Crossed, BootstrapResamplesRowsAndColumns) {
  Table t(3, 3);
  t << 0, 0, 0, 1, 1, 1, 2, 2, 2;
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Table r = resample_table(t, rng);
    // Row resampling keeps every row constant.
    for (int i = 0; i < 3; ++i) EXPECT_EQ(r.row(i).minCoeff(), r.row(i).maxCoeff());
  }
  const auto a = crossed_anova(t, BootstrapSpec{300, 4, 0.95});
  const auto b = crossed_anova(t, BootstrapSpec{300, 4, 0.95});
  EXPECT_EQ(a.ci_llm->lo, b.ci_llm->lo);
  EXPECT_EQ(a.ci_llm->hi, b.ci_llm->hi);
  // Resamples that pick a single row are constant tables and get redrawn.
  EXPECT_GE(a.ci_llm->draws, a.ci_llm->resamples);
  EXPECT_DOUBLE_EQ(a.ci_llm->lo, 1.0);
}

TEST(Anchored, PointEstimates) {
  const auto d = anchored_decomposition({0.5, 0.5, 0.5}, {0.0, 1.0}, {0.0, 1.0, 0.5, 0.2});
  EXPECT_DOUBLE_EQ(d.rl_std, 0.0);
  EXPECT_NEAR(d.llm_std, 0.7071067811865476, 1e-12);
  ASSERT_TRUE(d.llm_ratio.has_value());
  EXPECT_NEAR(*d.llm_ratio, 0.5 / sample_variance({0.0, 1.0, 0.5, 0.2}), 1e-12);
  EXPECT_GT(*d.llm_ratio, 1.0);  // ratios may exceed 1
  const auto flat = anchored_decomposition({1, 2}, {1, 3}, {0.4, 0.4});
  EXPECT_FALSE(flat.rl_ratio.has_value());
  EXPECT_THROW(anchored_decomposition({1}, {1, 2}, {1, 2}), ContractViolation);
}

TEST(Anchored, RecoversSyntheticStds) {
  const double sigma_llm = 0.3, sigma_rl = 0.05;
  Rng rng(21);
  double rl = 0, llm = 0;
  const int reps = 50;
  for (int k = 0; k < reps; ++k) {
    const double program0 = rng.normal(0, sigma_llm), seed0 = rng.normal(0, sigma_rl);
    std::vector<double> fixed_program, fixed_seed, main;
    for (int j = 0; j < 10; ++j) fixed_program.push_back(0.5 + program0 + rng.normal(0, sigma_rl));
    for (int i = 0; i < 10; ++i) fixed_seed.push_back(0.5 + rng.normal(0, sigma_llm) + seed0);
    for (int i = 0; i < 10; ++i) main.push_back(0.5 + rng.normal(0, sigma_llm) + rng.normal(0, sigma_rl));
    const auto d = anchored_decomposition(fixed_program, fixed_seed, main, std::nullopt);
    rl += d.rl_std;
    llm += d.llm_std;
  }
  EXPECT_NEAR(rl / reps, sigma_rl, 0.2 * sigma_rl);
  EXPECT_NEAR(llm / reps, sigma_llm, 0.2 * sigma_llm);
}

TEST(Summary, FinalWindowMeanAndStd) {
  std::vector<orchestrator::RunRecord> all_success;
  for (int s = 0; s < 10; ++s) all_success.push_back(fake_run(envs::EnvId::DoorKey5, s, std::vector<bool>(150, true)));
  const auto s = summarize_batch(all_success);
  EXPECT_EQ(s.metric, "success_rate");
  EXPECT_EQ(s.n, 10);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_DOUBLE_EQ(s.std, 0.0);
  EXPECT_EQ(s.curve_mean.size(), 150u);

  const auto single = summarize_batch({fake_run(envs::EnvId::DoorKey5, 1, std::vector<bool>(20, true))});
  EXPECT_EQ(single.n, 1);
  EXPECT_DOUBLE_EQ(single.std, 0.0);

  // Only the last 100 episodes count: 50 failures then k successes in the window.
  std::vector<orchestrator::RunRecord> mixed;
  const std::vector<int> wins = {30, 60, 90};
  for (int k : wins) {
    std::vector<bool> eps(50, true);
    for (int i = 0; i < 100; ++i) eps.push_back(i < k);
    mixed.push_back(fake_run(envs::EnvId::DoorKey8, k, eps));
  }
  const auto m = summarize_batch(mixed);
  EXPECT_NEAR(m.mean, 0.6, 1e-12);
  EXPECT_NEAR(m.std, 0.3, 1e-12);
}

TEST(Summary, ContinuousTasksUseRawReturn) {
  std::vector<orchestrator::RunRecord> runs = {fake_run(envs::EnvId::LineRunner, 1, std::vector<bool>(60, true), 4.0),
                                               fake_run(envs::EnvId::LineRunner, 2, std::vector<bool>(60, true), 6.0)};
  const auto s = summarize_batch(runs);
  EXPECT_EQ(s.metric, "return");
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.std, std::sqrt(2.0), 1e-12);
  // Continuous curves use a 50-episode window.
  EXPECT_DOUBLE_EQ(learning_curve(envs::EnvId::LineRunner, runs[0].final_log->episodes)[49], 4.0);
}

namespace {

orchestrator::PlanResult synthetic_result() {
  orchestrator::PlanResult r;
  r.plan = orchestrator::plan_from_json(nlohmann::json::parse(R"j({
    "name": "synthetic",
    "batches": [
      {"env": "DoorKey5", "condition": "NO_SHAPING", "label": "a", "seeds": [1, 2, 3]},
      {"env": "DoorKey5", "condition": "HAND_CRAFTED", "label": "b", "seeds": [1, 2, 3]},
      {"env": "LineRunner", "condition": "NO_SHAPING", "label": "c", "seeds": [1, 2]},
      {"env": "LineRunner", "condition": "HAND_CRAFTED", "label": "d", "seeds": [1, 2]}
    ],
    "crossed": [{"env": "DoorKey5", "label": "x", "program_seeds": [10, 20], "train_seeds": [1, 2],
                 "anchor_batch": "a"}],
    "comparisons": [{"a": "b", "b": "a"}, {"a": "d", "b": "c"}]})j"));
  r.digest = orchestrator::plan_digest(r.plan);
  auto batch = [&](const std::string& label, envs::EnvId env, std::vector<orchestrator::RunRecord> records) {
    orchestrator::BatchResult b;
    b.label = label;
    b.env = env;
    b.records = std::move(records);
    r.batches.push_back(std::move(b));
  };
  auto eps = [](int wins) {
    std::vector<bool> e(100, false);
    for (int i = 0; i < wins; ++i) e[i] = true;
    return e;
  };
  batch("a", envs::EnvId::DoorKey5,
        {fake_run(envs::EnvId::DoorKey5, 1, eps(10)), fake_run(envs::EnvId::DoorKey5, 2, eps(20)),
         fake_run(envs::EnvId::DoorKey5, 3, eps(60))});
  batch("b", envs::EnvId::DoorKey5,
        {fake_run(envs::EnvId::DoorKey5, 1, eps(90)), fake_run(envs::EnvId::DoorKey5, 2, eps(95)),
         fake_run(envs::EnvId::DoorKey5, 3, eps(85))});
  batch("c", envs::EnvId::LineRunner,
        {fake_run(envs::EnvId::LineRunner, 1, eps(100), 3.0), fake_run(envs::EnvId::LineRunner, 2, eps(100), 4.0)});
  batch("d", envs::EnvId::LineRunner,
        {fake_run(envs::EnvId::LineRunner, 1, eps(100), 5.0), fake_run(envs::EnvId::LineRunner, 2, eps(100), 7.5)});
  std::vector<orchestrator::RunRecord> cells;
  const int wins[2][2] = {{80, 70}, {20, 30}};
  for (int p = 0; p < 2; ++p)
    for (int s = 0; s < 2; ++s) {
      auto rec = fake_run(envs::EnvId::DoorKey5, s + 1, eps(wins[p][s]));
      rec.program_seed = p == 0 ? 10 : 20;
      cells.push_back(rec);
    }
  batch("x", envs::EnvId::DoorKey5, cells);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Report, TablesFamiliesAndDecomposition) {
  const auto result = synthetic_result();
  const auto rep = report::build_report(result, {}, {500, 1, 0.95});
  const auto summary = parse_csv(report::summary_csv(rep));
  ASSERT_EQ(summary.size(), 5u);
  EXPECT_EQ(summary[0][0], "label");
  EXPECT_EQ(summary[1][0], "a");
  EXPECT_NEAR(std::stod(summary[1][5]), 0.3, 1e-9);
  EXPECT_NEAR(std::stod(summary[1][6]), sample_std({0.1, 0.2, 0.6}), 1e-9);
  EXPECT_EQ(summary[3][3], "return");
  EXPECT_NEAR(std::stod(summary[3][5]), 3.5, 1e-9);

  const auto tests = parse_csv(report::tests_csv(rep));
  ASSERT_EQ(tests.size(), 3u);  // header + one row per planned comparison
  EXPECT_EQ(tests[1][0], "b vs a");
  EXPECT_EQ(tests[1][1], "grid");
  EXPECT_EQ(tests[2][1], "continuous");
  // Each comparison is alone in its family, so Holm leaves p unchanged.
  EXPECT_EQ(tests[1][5], tests[1][6]);
  const auto w = welch_test({0.9, 0.95, 0.85}, {0.1, 0.2, 0.6});
  EXPECT_NEAR(std::stod(tests[1][2]), w.delta, 1e-9);
  EXPECT_NEAR(std::stod(tests[1][5]), w.p, 1e-9);
  EXPECT_NEAR(std::stod(tests[1][7]), w.cohens_d, 1e-9);

  const auto dj = report::decomposition_json(rep);
  ASSERT_EQ(dj["decompositions"].size(), 1u);
  const auto& shares = dj["decompositions"][0]["crossed"]["shares"];
  EXPECT_NEAR(shares["llm"].get<double>() + shares["rl"].get<double>() + shares["residual"].get<double>(), 1.0,
              1e-12);
  EXPECT_GT(shares["llm"].get<double>(), 0.9);
  const auto& anchored = dj["decompositions"][0]["anchored"];
  EXPECT_NEAR(anchored["rl_std"].get<double>(), sample_std({0.8, 0.7}), 1e-12);
  EXPECT_NEAR(anchored["llm_std"].get<double>(), sample_std({0.8, 0.2}), 1e-12);

  const auto md = report::markdown(rep);
  EXPECT_NE(md.find("| a | DoorKey5 | NO_SHAPING |"), std::string::npos);
  EXPECT_NE(md.find("curves_DoorKey5.svg"), std::string::npos);
  const auto svgs = report::curve_svgs(rep);
  ASSERT_EQ(svgs.size(), 2u);
  EXPECT_NE(svgs.at("curves_DoorKey5.svg").find("<polygon"), std::string::npos);
}

TEST(Report, HolmWithinFamilies) {
  auto result = synthetic_result();
  result.plan.comparisons.push_back({"a", "b"});
  const auto rep = report::build_report(result, {}, {200, 1, 0.95});
  ASSERT_EQ(rep.tests.size(), 3u);
  const auto holm = holm_bonferroni({rep.tests[0].result->p, rep.tests[2].result->p});
  EXPECT_NEAR(rep.tests[0].p_corr, holm.adjusted[0], 1e-15);
  EXPECT_NEAR(rep.tests[2].p_corr, holm.adjusted[1], 1e-15);
  EXPECT_NEAR(rep.tests[1].p_corr, rep.tests[1].result->p, 1e-15);
}

TEST(Report, GapsAreFlagged) {
  auto result = synthetic_result();
  result.batches[0].records.pop_back();
  result.batches[1].records[0].status = orchestrator::RunStatus::GenerationFailed;
  result.batches[4].records.pop_back();
  const auto rep = report::build_report(result, {"runs/a/seed_3"}, {200, 1, 0.95});
  EXPECT_EQ(rep.summary[0].missing, 1);
  EXPECT_EQ(rep.summary[0].summary.n, 2);
  EXPECT_EQ(rep.summary[1].failed, 1);
  ASSERT_EQ(rep.decompositions[0].missing.size(), 1u);
  EXPECT_EQ(rep.decompositions[0].missing[0].program_seed, 20u);
  EXPECT_EQ(rep.decompositions[0].missing[0].seed, 2u);
  EXPECT_FALSE(rep.decompositions[0].crossed.has_value());
  const auto md = report::markdown(rep);
  EXPECT_NE(md.find("## Gaps"), std::string::npos);
  EXPECT_NE(md.find("missing cell (program 20, seed 2)"), std::string::npos);
}

TEST(Report, Deterministic) {
  const auto result = synthetic_result();
  const auto a = report::build_report(result, {}, {300, 1, 0.95});
  const auto b = report::build_report(result, {}, {300, 1, 0.95});
  EXPECT_EQ(report::summary_csv(a), report::summary_csv(b));
  EXPECT_EQ(report::tests_csv(a), report::tests_csv(b));
  EXPECT_EQ(report::decomposition_json(a).dump(), report::decomposition_json(b).dump());
  EXPECT_EQ(report::curve_svgs(a), report::curve_svgs(b));
}
