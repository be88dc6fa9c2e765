#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rewardlab/errors.hpp"
#include "rewardlab/generator/client.hpp"

namespace rewardlab::generator {

// Chat-completion provider settings. Loaded from JSON; nothing provider-specific is hard-coded.
struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  double temperature = kDefaultTemperature;
  int timeout_seconds = 120;
  int max_tokens = 2048;
};

inline ProviderConfig provider_config_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("endpoint", c.endpoint);
  take("model", c.model);
  take("api_key_env", c.api_key_env);
  take("auth_header", c.auth_header);
  take("auth_prefix", c.auth_prefix);
  take("temperature", c.temperature);
  take("timeout_seconds", c.timeout_seconds);
  take("max_tokens", c.max_tokens);
  if (c.timeout_seconds <= 0) throw ConfigError("timeout_seconds must be positive");
  return c;
}

inline ProviderConfig load_provider_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read provider config " + path);
  try {
    return provider_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad provider config " + path + ": " + e.what());
  }
}

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

// Single-turn chat completion over HTTP. No retries of its own.
class HttpGenerator : public GeneratorClient {
 public:
  // Throws AuthMissing before any network activity when the key variable is unset.
  explicit HttpGenerator(ProviderConfig config) : cfg_(std::move(config)), endpoint_(split_endpoint(cfg_.endpoint)) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw AuthMissing("environment variable " + cfg_.api_key_env + " is not set");
    key_ = key;
  }

  std::string complete(const PromptBundle& prompt, double temperature) override {
    httplib::Client cli(endpoint_.base);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    cli.set_write_timeout(cfg_.timeout_seconds, 0);
    const nlohmann::json body = {{"model", cfg_.model},
                                 {"temperature", temperature},
                                 {"max_tokens", cfg_.max_tokens},
                                 {"messages",
                                  {{{"role", "system"}, {"content", prompt.system_text}},
                                   {{"role", "user"}, {"content", prompt.user_text}}}}};
    httplib::Headers headers = {{cfg_.auth_header, cfg_.auth_prefix + key_}};
    auto res = cli.Post(endpoint_.path, headers, body.dump(), "application/json");
    if (!res) throw GeneratorError("request to " + cfg_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw GeneratorError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    return response_text(res->body);
  }

  std::string name() const override { return "http:" + cfg_.model; }

  // Accepts choices[0].message.content or content[0].text.
  static std::string response_text(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw GeneratorError(std::string("provider response is not JSON: ") + e.what());
    }
    if (j.contains("choices") && !j["choices"].empty()) {
      const auto& msg = j["choices"][0].value("message", nlohmann::json::object());
      if (msg.contains("content") && msg["content"].is_string()) return msg["content"].get<std::string>();
    }
    if (j.contains("content") && j["content"].is_array() && !j["content"].empty() &&
        j["content"][0].contains("text"))
      return j["content"][0]["text"].get<std::string>();
    throw GeneratorError("provider response has no completion text");
  }

 private:
  ProviderConfig cfg_;
  Endpoint endpoint_;
  std::string key_;
};

inline ClientFactory http_factory(const ProviderConfig& config) {
  // Fail fast on missing credentials.
  HttpGenerator probe(config);
  return [config] { return std::make_unique<HttpGenerator>(config); };
}

}  // namespace rewardlab::generator
