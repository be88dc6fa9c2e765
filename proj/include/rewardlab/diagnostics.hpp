#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/errors.hpp"
#include "rewardlab/ppo/run_log.hpp"

namespace rewardlab::diagnostics {

enum class Flag { RewardHacking, ShapingWeak, Plateau, ReturnDeclining, ReturnStagnated };

inline std::string_view to_string(Flag f) {
  switch (f) {
    case Flag::RewardHacking: return "REWARD_HACKING";
    case Flag::ShapingWeak: return "SHAPING_WEAK";
    case Flag::Plateau: return "PLATEAU";
    case Flag::ReturnDeclining: return "RETURN_DECLINING";
    case Flag::ReturnStagnated: return "RETURN_STAGNATED";
  }
  return "?";
}

inline Flag parse_flag(std::string_view s) {
  for (Flag f : {Flag::RewardHacking, Flag::ShapingWeak, Flag::Plateau, Flag::ReturnDeclining,
                 Flag::ReturnStagnated})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown diagnostic flag '" + std::string(s) + "'");
}

// Warning strings shown to the generator. Part of the prompt contract.
inline std::string_view warning(Flag f) {
  switch (f) {
    case Flag::RewardHacking: return "REWARD HACKING DETECTED";
    case Flag::ShapingWeak: return "SHAPING TOO WEAK";
    case Flag::Plateau: return "PLATEAU DETECTED";
    case Flag::ReturnDeclining: return "RETURN DECLINING";
    case Flag::ReturnStagnated: return "RETURN STAGNATED";
  }
  return "?";
}

enum class Mode { Sparse, Dense };

inline std::string_view to_string(Mode m) { return m == Mode::Sparse ? "sparse" : "dense"; }

struct DiagnosticConfig {
  double rh_mr_cutoff = 0.5;
  double rh_sr_cutoff = 0.2;
  double sw_mr_cutoff = 0.1;
  double sw_sr_cutoff = 0.1;
  struct {
    double sr_low = 0.1;
    double sr_high = 0.7;
    int min_eps = 1000;
    double delta_cutoff = 0.05;
  } plateau;
  struct {
    double decline_factor = 0.9;
    double stagnate_factor = 0.05;
  } dense;
  struct {
    bool rh = true;
    bool sw = true;
    bool lp = true;
  } enabled;
  Mode mode = Mode::Sparse;
  // Fraction of the probe used for each end of the plateau improvement estimate.
  double improvement_fraction = 0.2;
};

struct Trigger {
  Flag flag;
  std::map<std::string, double> values;
};

struct Diagnosis {
  std::vector<Flag> flags;
  std::vector<Trigger> triggers;
  std::vector<std::string> messages;

  bool has(Flag f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
  bool empty() const { return flags.empty(); }

  void fire(Flag f, std::map<std::string, double> values) {
    flags.push_back(f);
    triggers.push_back({f, std::move(values)});
    messages.emplace_back(warning(f));
  }
};

struct ReturnTrend {
  double first_half_mean = 0.0;
  double second_half_mean = 0.0;
};

// Mean of the last fraction of the history minus the mean of the first fraction.
inline double sr_improvement(const std::vector<double>& sr_history, double fraction = 0.2) {
  require(!sr_history.empty(), "sr_improvement needs a nonempty history");
  require(fraction > 0.0 && fraction <= 0.5, "fraction must be in (0, 0.5]");
  const std::size_t n = sr_history.size();
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * n)));
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    head += sr_history[i];
    tail += sr_history[n - k + i];
  }
  return (tail - head) / static_cast<double>(k);
}

inline Diagnosis diagnose_sparse(const ppo::ProbeMetrics& m, const DiagnosticConfig& cfg) {
  require(cfg.mode == Mode::Sparse, "diagnose_sparse called with dense config");
  Diagnosis d;
  const double mr = m.mean_reward, sr = m.success_rate;
  if (cfg.enabled.rh && mr > cfg.rh_mr_cutoff && sr < cfg.rh_sr_cutoff)
    d.fire(Flag::RewardHacking, {{"mr", mr}, {"sr", sr}});
  if (cfg.enabled.sw && mr < cfg.sw_mr_cutoff && sr < cfg.sw_sr_cutoff)
    d.fire(Flag::ShapingWeak, {{"mr", mr}, {"sr", sr}});
  if (cfg.enabled.lp && sr > cfg.plateau.sr_low && sr < cfg.plateau.sr_high && m.episodes > cfg.plateau.min_eps) {
    const double delta = m.sr_history.empty() ? 0.0 : sr_improvement(m.sr_history, cfg.improvement_fraction);
    if (delta < cfg.plateau.delta_cutoff)
      d.fire(Flag::Plateau, {{"sr", sr}, {"episodes", m.episodes}, {"delta_sr", delta}});
  }
  return d;
}

// Odd counts drop the middle episode.
inline ReturnTrend return_trend(const std::vector<double>& returns) {
  require(returns.size() >= 2, "return trend needs at least 2 episodes");
  const std::size_t half = returns.size() / 2;
  ReturnTrend t;
  for (std::size_t i = 0; i < half; ++i) {
    t.first_half_mean += returns[i];
    t.second_half_mean += returns[returns.size() - half + i];
  }
  t.first_half_mean /= static_cast<double>(half);
  t.second_half_mean /= static_cast<double>(half);
  return t;
}

inline Diagnosis diagnose_dense(const std::vector<double>& returns, const DiagnosticConfig& cfg) {
  const ReturnTrend t = return_trend(returns);
  const double r1 = t.first_half_mean, r2 = t.second_half_mean;
  Diagnosis d;
  if (r2 < cfg.dense.decline_factor * r1) {
    d.fire(Flag::ReturnDeclining, {{"first_half_mean", r1}, {"second_half_mean", r2}});
  } else if (std::abs(r2 - r1) < cfg.dense.stagnate_factor * std::abs(r1)) {
    d.fire(Flag::ReturnStagnated, {{"first_half_mean", r1}, {"second_half_mean", r2}});
  }
  return d;
}

// Dispatches on cfg.mode. Dense mode reads per-episode shaped returns.
inline Diagnosis diagnose(const std::vector<ppo::EpisodeRecord>& probe, const ppo::ProbeMetrics& m,
                          const DiagnosticConfig& cfg) {
  if (cfg.mode == Mode::Sparse) return diagnose_sparse(m, cfg);
  std::vector<double> returns;
  returns.reserve(probe.size());
  for (const auto& e : probe) returns.push_back(e.shaped_return);
  return diagnose_dense(returns, cfg);
}

inline nlohmann::json to_json(const Diagnosis& d) {
  nlohmann::json flags = nlohmann::json::array(), triggers = nlohmann::json::array();
  for (Flag f : d.flags) flags.push_back(std::string(to_string(f)));
  for (const auto& t : d.triggers) triggers.push_back({{"flag", std::string(to_string(t.flag))}, {"values", t.values}});
  return {{"flags", flags}, {"triggers", triggers}, {"messages", d.messages}};
}

inline Diagnosis diagnosis_from_json(const nlohmann::json& j) {
  Diagnosis d;
  for (const auto& t : j.at("triggers"))
    d.fire(parse_flag(t.at("flag").get<std::string>()), t.at("values").get<std::map<std::string, double>>());
  return d;
}

inline nlohmann::json to_json(const DiagnosticConfig& c) {
  return {{"rh_mr_cutoff", c.rh_mr_cutoff},
          {"rh_sr_cutoff", c.rh_sr_cutoff},
          {"sw_mr_cutoff", c.sw_mr_cutoff},
          {"sw_sr_cutoff", c.sw_sr_cutoff},
          {"plateau",
           {{"sr_low", c.plateau.sr_low},
            {"sr_high", c.plateau.sr_high},
            {"min_eps", c.plateau.min_eps},
            {"delta_cutoff", c.plateau.delta_cutoff}}},
          {"dense", {{"decline_factor", c.dense.decline_factor}, {"stagnate_factor", c.dense.stagnate_factor}}},
          {"enabled", {{"rh", c.enabled.rh}, {"sw", c.enabled.sw}, {"lp", c.enabled.lp}}},
          {"mode", std::string(to_string(c.mode))},
          {"improvement_fraction", c.improvement_fraction}};
}

// Missing keys keep the values already in c.
inline void apply_overrides(DiagnosticConfig& c, const nlohmann::json& j) {
  auto take = [](const nlohmann::json& obj, const char* key, auto& field) {
    if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
  };
  take(j, "rh_mr_cutoff", c.rh_mr_cutoff);
  take(j, "rh_sr_cutoff", c.rh_sr_cutoff);
  take(j, "sw_mr_cutoff", c.sw_mr_cutoff);
  take(j, "sw_sr_cutoff", c.sw_sr_cutoff);
  take(j, "improvement_fraction", c.improvement_fraction);
  if (j.contains("plateau")) {
    const auto& p = j.at("plateau");
    take(p, "sr_low", c.plateau.sr_low);
    take(p, "sr_high", c.plateau.sr_high);
    take(p, "min_eps", c.plateau.min_eps);
    take(p, "delta_cutoff", c.plateau.delta_cutoff);
  }
  if (j.contains("dense")) {
    take(j.at("dense"), "decline_factor", c.dense.decline_factor);
    take(j.at("dense"), "stagnate_factor", c.dense.stagnate_factor);
  }
  if (j.contains("enabled")) {
    take(j.at("enabled"), "rh", c.enabled.rh);
    take(j.at("enabled"), "sw", c.enabled.sw);
    take(j.at("enabled"), "lp", c.enabled.lp);
  }
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "sparse") c.mode = Mode::Sparse;
    else if (m == "dense") c.mode = Mode::Dense;
    else throw ConfigError("unknown diagnostic mode '" + m + "'");
  }
}

}  // namespace rewardlab::diagnostics
