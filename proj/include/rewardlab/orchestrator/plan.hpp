#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewardlab/orchestrator/orchestrator.hpp"

namespace rewardlab::orchestrator {

// One condition on one env over a list of seeds. Overrides are kept verbatim
// so the canonical plan (and its digest) reflects exactly what was asked for.
struct Batch {
  std::string label;
  envs::EnvId env = envs::EnvId::DoorKey5;
  Condition condition;
  std::vector<std::uint64_t> seeds;
  nlohmann::json refinement = nlohmann::json::object();
  nlohmann::json train = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
};

// L programs x R training seeds, one full run per cell.
struct CrossedBatch {
  std::string label;
  envs::EnvId env = envs::EnvId::DoorKey5;
  std::vector<std::uint64_t> program_seeds;  // programs come from one-shot generation with these seeds
  std::vector<std::string> programs;         // or are given literally (row index = program seed)
  std::vector<std::uint64_t> train_seeds;
  nlohmann::json refinement = nlohmann::json::object();
  nlohmann::json train = nlohmann::json::object();
  // Regular batch whose variance anchors the single-anchor decomposition (optional).
  std::string anchor_batch;

  std::size_t rows() const { return programs.empty() ? program_seeds.size() : programs.size(); }
};

struct Comparison {
  std::string a;
  std::string b;
};

struct Plan {
  std::string name = "plan";
  std::string client;  // "", "scripted:<scenario>" or "http:<config.json>"
  bool tolerate_failures = false;
  std::vector<Batch> batches;
  std::vector<CrossedBatch> crossed;
  std::vector<Comparison> comparisons;
  nlohmann::json sweep;  // present when the plan was expanded from a sweep
};

inline std::string sanitize_label(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '=' || c == '@'))
      c = '_';
  return s;
}

inline std::string default_label(const Batch& b) {
  std::string s = std::string(envs::to_string(b.env)) + "__" + to_string(b.condition);
  if (b.condition.kind == Condition::Kind::Iterative && b.condition.prompt_mode != generator::PromptMode::RefineFull)
    s += "__" + std::string(generator::to_string(b.condition.prompt_mode));
  return sanitize_label(s);
}

inline RefinementConfig refinement_for(envs::EnvId env, const nlohmann::json& refinement, const nlohmann::json& train,
                                       const nlohmann::json& diag) {
  RefinementConfig c = default_refinement(env);
  auto take = [&](const char* key, auto& field) {
    if (refinement.contains(key)) field = refinement.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("tau", c.tau);
  take("max_iterations", c.max_iterations);
  take("probe_episodes", c.probe_episodes);
  take("full_episodes", c.full_episodes);
  take("force_sparse", c.force_sparse);
  take("eval_window", c.eval_window);
  take("max_retries", c.retry.max_retries);
  take("temperature", c.retry.temperature);
  if (c.max_iterations < 0 || c.probe_episodes <= 0 || c.full_episodes < 0 || c.eval_window <= 0 ||
      c.retry.max_retries < 0)
    throw ConfigError("refinement settings out of range");
  ppo::apply_overrides(c.train, train);
  diagnostics::apply_overrides(c.diagnostics, diag);
  return c;
}

inline RefinementConfig refinement_for(const Batch& b) {
  auto c = refinement_for(b.env, b.refinement, b.train, b.diagnostics);
  c.prompt_mode = b.condition.prompt_mode;
  return c;
}

namespace detail {

inline std::vector<std::uint64_t> seeds_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {kDefaultSeeds.begin(), kDefaultSeeds.end()};
  auto seeds = j.at(key).get<std::vector<std::uint64_t>>();
  if (seeds.empty()) throw ConfigError(std::string(key) + " must not be empty");
  return seeds;
}

inline nlohmann::json object_at(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return nlohmann::json::object();
  if (!j.at(key).is_object()) throw ConfigError(std::string(key) + " must be an object");
  return j.at(key);
}

}  // namespace detail

inline Plan plan_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("plan must be a JSON object");
    Plan p;
    p.name = j.value("name", "plan");
    p.client = j.value("client", "");
    p.tolerate_failures = j.value("tolerate_failures", false);
    if (j.contains("sweep")) p.sweep = j.at("sweep");
    nlohmann::json batches = j.value("batches", nlohmann::json::array());
    if (j.contains("env") && j.contains("condition")) batches.push_back(j);
    for (const auto& bj : batches) {
      Batch b;
      b.env = envs::parse_env_id(bj.at("env").get<std::string>());
      b.condition = parse_condition(bj.at("condition").get<std::string>());
      if (bj.contains("prompt_mode")) {
        b.condition.prompt_mode = generator::parse_prompt_mode(bj.at("prompt_mode").get<std::string>());
        if (b.condition.prompt_mode == generator::PromptMode::Generation)
          throw ConfigError("prompt_mode must be a refine mode");
      }
      b.seeds = detail::seeds_from(bj, "seeds");
      b.refinement = detail::object_at(bj, "refinement");
      b.train = detail::object_at(bj, "train");
      b.diagnostics = detail::object_at(bj, "diagnostics");
      b.label = bj.contains("label") ? sanitize_label(bj.at("label").get<std::string>()) : default_label(b);
      refinement_for(b);  // validates overrides
      p.batches.push_back(std::move(b));
    }
    for (const auto& cj : j.value("crossed", nlohmann::json::array())) {
      CrossedBatch c;
      c.env = envs::parse_env_id(cj.at("env").get<std::string>());
      if (cj.contains("programs")) c.programs = cj.at("programs").get<std::vector<std::string>>();
      else c.program_seeds = detail::seeds_from(cj, "program_seeds");
      c.train_seeds = detail::seeds_from(cj, "train_seeds");
      c.refinement = detail::object_at(cj, "refinement");
      c.train = detail::object_at(cj, "train");
      c.label = sanitize_label(cj.value("label", std::string(envs::to_string(c.env)) + "__CROSSED"));
      c.anchor_batch = cj.value("anchor_batch", "");
      if (c.rows() < 2 || c.train_seeds.size() < 2) throw ConfigError("crossed batch needs at least 2 x 2 cells");
      for (const auto& text : c.programs)
        if (const auto rep = dsl::validate(text, envs::kind_of(c.env)); !rep.ok)
          throw ConfigError("crossed program is invalid: " + rep.summary());
      refinement_for(c.env, c.refinement, c.train, nlohmann::json::object());
      p.crossed.push_back(std::move(c));
    }
    for (const auto& cj : j.value("comparisons", nlohmann::json::array()))
      p.comparisons.push_back({cj.at("a").get<std::string>(), cj.at("b").get<std::string>()});
    if (p.batches.empty() && p.crossed.empty()) throw ConfigError("plan has no batches");
    std::vector<std::string> labels;
    for (const auto& b : p.batches) labels.push_back(b.label);
    for (const auto& c : p.crossed) labels.push_back(c.label);
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t k = i + 1; k < labels.size(); ++k)
        if (labels[i] == labels[k]) throw ConfigError("duplicate batch label '" + labels[i] + "'");
    for (const auto& c : p.crossed) {
      if (c.anchor_batch.empty()) continue;
      auto b = std::find_if(p.batches.begin(), p.batches.end(), [&](const Batch& x) { return x.label == c.anchor_batch; });
      if (b == p.batches.end()) throw ConfigError("anchor_batch names unknown batch '" + c.anchor_batch + "'");
      if (b->env != c.env) throw ConfigError("anchor_batch must use the crossed batch's environment");
    }
    for (const auto& c : p.comparisons)
      for (const auto& l : {c.a, c.b})
        if (std::find(labels.begin(), labels.end(), l) == labels.end())
          throw ConfigError("comparison names unknown batch '" + l + "'");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid plan: ") + e.what());
  }
}

inline nlohmann::json to_json(const Plan& p) {
  nlohmann::json batches = nlohmann::json::array(), crossed = nlohmann::json::array(),
                 comparisons = nlohmann::json::array();
  for (const auto& b : p.batches)
    batches.push_back({{"label", b.label},
                       {"env", std::string(envs::to_string(b.env))},
                       {"condition", to_string(b.condition)},
                       {"prompt_mode", std::string(generator::to_string(b.condition.prompt_mode))},
                       {"seeds", b.seeds},
                       {"refinement", b.refinement},
                       {"train", b.train},
                       {"diagnostics", b.diagnostics}});
  for (const auto& c : p.crossed) {
    nlohmann::json j = {{"label", c.label},
                        {"env", std::string(envs::to_string(c.env))},
                        {"train_seeds", c.train_seeds},
                        {"refinement", c.refinement},
                        {"train", c.train}};
    if (!c.anchor_batch.empty()) j["anchor_batch"] = c.anchor_batch;
    if (c.programs.empty()) j["program_seeds"] = c.program_seeds;
    else j["programs"] = c.programs;
    crossed.push_back(std::move(j));
  }
  for (const auto& c : p.comparisons) comparisons.push_back({{"a", c.a}, {"b", c.b}});
  nlohmann::json j = {{"name", p.name},
                      {"client", p.client},
                      {"tolerate_failures", p.tolerate_failures},
                      {"batches", batches},
                      {"crossed", crossed},
                      {"comparisons", comparisons}};
  if (!p.sweep.is_null()) j["sweep"] = p.sweep;
  return j;
}

inline Plan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read plan " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("plan " + path + " is not valid JSON: " + e.what());
  }
  return plan_from_json(j);
}

// Comma- or space-separated list, e.g. "42,123,456".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream words(token);
    std::string w;
    while (words >> w) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
      if (ec != std::errc{} || ptr != w.data() + w.size()) throw ConfigError("bad seed '" + w + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

// Replaces every batch's seeds (and crossed training seeds).
inline void override_seeds(Plan& p, const std::vector<std::uint64_t>& seeds) {
  for (auto& b : p.batches) b.seeds = seeds;
  for (auto& c : p.crossed) {
    if (seeds.size() < 2) throw ConfigError("crossed batches need at least 2 seeds");
    c.train_seeds = seeds;
  }
}

// Stable 64-bit FNV-1a digest, hex encoded.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string plan_digest(const Plan& p) { return digest(to_json(p).dump()); }

// Sweep axes: "threshold" (parameter names a diagnostic setting), "probe_length",
// "rnd_coef", "detector_removal" (values are RH, SW, LP).
struct SweepSpec {
  std::string axis;
  std::string parameter;
  std::vector<nlohmann::json> values;
};

inline SweepSpec sweep_from_json(const nlohmann::json& j) {
  SweepSpec s;
  try {
    s.axis = j.at("axis").get<std::string>();
    s.parameter = j.value("parameter", "");
    s.values = j.at("values").get<std::vector<nlohmann::json>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid sweep: ") + e.what());
  }
  if (s.values.empty()) throw ConfigError("sweep has no values");
  return s;
}

// One copy of every base batch per sweep value; labels get an "@axis=value" suffix.
inline Plan expand_sweep(const Plan& base, const SweepSpec& s) {
  static const std::vector<std::string> thresholds = {"rh_mr_cutoff", "rh_sr_cutoff", "sw_mr_cutoff", "sw_sr_cutoff"};
  static const std::vector<std::string> plateau = {"sr_low", "sr_high", "min_eps", "delta_cutoff"};
  static const std::vector<std::string> dense = {"decline_factor", "stagnate_factor"};
  if (s.axis != "threshold" && s.axis != "probe_length" && s.axis != "rnd_coef" && s.axis != "detector_removal")
    throw ConfigError("unknown sweep axis '" + s.axis + "'");
  if (s.axis == "threshold") {
    const bool known = std::find(thresholds.begin(), thresholds.end(), s.parameter) != thresholds.end() ||
                       std::find(plateau.begin(), plateau.end(), s.parameter) != plateau.end() ||
                       std::find(dense.begin(), dense.end(), s.parameter) != dense.end();
    if (!known) throw ConfigError("unknown threshold '" + s.parameter + "'");
  }
  Plan out = base;
  out.batches.clear();
  out.crossed.clear();
  out.comparisons.clear();
  out.sweep = {{"axis", s.axis}, {"parameter", s.parameter}, {"values", s.values}, {"batches", nlohmann::json::array()}};
  for (const auto& v : s.values) {
    std::string tag;
    if (s.axis == "detector_removal") {
      const auto d = v.get<std::string>();
      if (d != "RH" && d != "SW" && d != "LP") throw ConfigError("detector must be RH, SW or LP, got " + d);
      tag = "-" + d;
    } else {
      if (!v.is_number()) throw ConfigError("sweep value must be a number");
      tag = v.dump();
    }
    for (Batch b : base.batches) {
      if (s.axis == "threshold") {
        if (std::find(plateau.begin(), plateau.end(), s.parameter) != plateau.end())
          b.diagnostics["plateau"][s.parameter] = v;
        else if (std::find(dense.begin(), dense.end(), s.parameter) != dense.end())
          b.diagnostics["dense"][s.parameter] = v;
        else
          b.diagnostics[s.parameter] = v;
      } else if (s.axis == "probe_length") {
        b.refinement["probe_episodes"] = v;
      } else if (s.axis == "rnd_coef") {
        if (b.condition.kind == Condition::Kind::Rnd) b.condition.rnd_coef = v.get<double>();
        else b.train["rnd_coef"] = v;
      } else {
        std::string key = v.get<std::string>();
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        b.diagnostics["enabled"][key] = false;
      }
      const std::string axis_name = s.axis == "threshold" ? s.parameter : s.axis;
      b.label = sanitize_label(b.label + "@" + axis_name + "=" + tag);
      refinement_for(b);
      out.sweep["batches"].push_back({{"label", b.label}, {"value", v}});
      out.batches.push_back(std::move(b));
    }
  }
  if (out.batches.empty()) throw ConfigError("sweep base plan has no condition batches");
  return out;
}

}  // namespace rewardlab::orchestrator
