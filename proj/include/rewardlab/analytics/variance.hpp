#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rewardlab/analytics/stats.hpp"

namespace rewardlab::analytics {

using Table = Eigen::MatrixXd;  // rows: programs, columns: training seeds

struct MeanSquares {
  double rows = 0.0;
  double cols = 0.0;
  double err = 0.0;
};

struct Shares {
  double llm = 0.0;
  double rl = 0.0;
  double residual = 0.0;
};

struct CrossedDecomposition {
  Table table;
  MeanSquares ms;
  // Variance components after clamping negatives to zero.
  double var_llm = 0.0;
  double var_rl = 0.0;
  double var_residual = 0.0;
  Shares shares;
  // All components are zero (constant table): shares are reported as 0.
  bool degenerate = false;
  std::optional<Interval> ci_llm, ci_rl, ci_residual;
};

inline MeanSquares mean_squares(const Table& y) {
  const auto L = y.rows(), R = y.cols();
  require(L >= 2 && R >= 2, "crossed table needs at least 2 rows and 2 columns");
  require(y.allFinite(), "crossed table has missing or non-finite cells");
  const double g = y.mean();
  const Eigen::VectorXd rm = y.rowwise().mean();
  const Eigen::RowVectorXd cm = y.colwise().mean();
  MeanSquares ms;
  ms.rows = static_cast<double>(R) * (rm.array() - g).square().sum() / static_cast<double>(L - 1);
  ms.cols = static_cast<double>(L) * (cm.array() - g).square().sum() / static_cast<double>(R - 1);
  const Table resid = (y.colwise() - rm).rowwise() - cm;
  ms.err = (resid.array() + g).square().sum() / static_cast<double>((L - 1) * (R - 1));
  return ms;
}

inline CrossedDecomposition crossed_point(const Table& y) {
  CrossedDecomposition d;
  d.table = y;
  d.ms = mean_squares(y);
  d.var_llm = std::max(0.0, (d.ms.rows - d.ms.err) / static_cast<double>(y.cols()));
  d.var_rl = std::max(0.0, (d.ms.cols - d.ms.err) / static_cast<double>(y.rows()));
  d.var_residual = std::max(0.0, d.ms.err);
  const double total = d.var_llm + d.var_rl + d.var_residual;
  // Relative cutoff so that rounding noise on a constant table is not read as variance.
  const double scale = std::max(1.0, y.array().abs().maxCoeff());
  if (total <= 1e-24 * scale * scale) {
    d.degenerate = true;
    return d;
  }
  d.shares = {d.var_llm / total, d.var_rl / total, d.var_residual / total};
  return d;
}

// Resamples rows and columns independently with replacement.
inline Table resample_table(const Table& y, Rng& rng) {
  std::vector<Eigen::Index> rows(y.rows()), cols(y.cols());
  for (auto& r : rows) r = static_cast<Eigen::Index>(rng.index(y.rows()));
  for (auto& c : cols) c = static_cast<Eigen::Index>(rng.index(y.cols()));
  Table out(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index k = 0; k < y.cols(); ++k) out(i, k) = y(rows[i], cols[k]);
  return out;
}

using TableStatistic = std::function<std::optional<double>(const Table&)>;

inline Interval bootstrap_table_ci(const Table& y, const TableStatistic& statistic, const BootstrapSpec& spec = {}) {
  require(y.size() > 0, "bootstrap needs data");
  return detail::percentile_interval(spec, [&](Rng& rng) { return statistic(resample_table(y, rng)); });
}

// Two-way random-effects decomposition with row/column bootstrap intervals on the shares.
inline CrossedDecomposition crossed_anova(const Table& y, const std::optional<BootstrapSpec>& spec = BootstrapSpec{}) {
  auto d = crossed_point(y);
  if (!spec || d.degenerate) return d;
  auto share = [](int which) {
    return [which](const Table& t) -> std::optional<double> {
      const auto r = crossed_point(t);
      if (r.degenerate) return std::nullopt;
      return which == 0 ? r.shares.llm : which == 1 ? r.shares.rl : r.shares.residual;
    };
  };
  d.ci_llm = bootstrap_table_ci(y, share(0), *spec);
  d.ci_rl = bootstrap_table_ci(y, share(1), *spec);
  d.ci_residual = bootstrap_table_ci(y, share(2), *spec);
  return d;
}

// Point estimates with one factor held at a single anchor. The two terms are
// not orthogonal; ratios are relative to the main batch's variance and can exceed 1.
struct AnchoredDecomposition {
  double rl_std = 0.0;   // fixed program, varied training seeds
  double llm_std = 0.0;  // fixed training seed, varied programs
  double total_variance = 0.0;
  std::optional<double> rl_ratio, llm_ratio;  // unset when the main batch has zero variance
  std::optional<Interval> ci_rl_std, ci_llm_std;
};

inline AnchoredDecomposition anchored_decomposition(const std::vector<double>& fixed_program,
                                                    const std::vector<double>& fixed_seed,
                                                    const std::vector<double>& main_batch,
                                                    const std::optional<BootstrapSpec>& spec = BootstrapSpec{}) {
  require(fixed_program.size() >= 2 && fixed_seed.size() >= 2, "anchored decomposition needs >= 2 runs per anchor");
  require(main_batch.size() >= 2, "anchored decomposition needs a main batch of >= 2 runs");
  AnchoredDecomposition d;
  d.rl_std = sample_std(fixed_program);
  d.llm_std = sample_std(fixed_seed);
  d.total_variance = sample_variance(main_batch);
  if (d.total_variance > 0.0) {
    d.rl_ratio = d.rl_std * d.rl_std / d.total_variance;
    d.llm_ratio = d.llm_std * d.llm_std / d.total_variance;
  }
  if (spec) {
    auto std_stat = [](const std::vector<double>& xs) -> std::optional<double> { return sample_std(xs); };
    d.ci_rl_std = bootstrap_ci(fixed_program, std_stat, *spec);
    d.ci_llm_std = bootstrap_ci(fixed_seed, std_stat, *spec);
  }
  return d;
}

}  // namespace rewardlab::analytics
