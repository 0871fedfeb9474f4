#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "heirag/error.hpp"
#include "heirag/explainer.hpp"

namespace heirag {

namespace {

std::string credential(const LlmConfig& cfg) {
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (!key || !*key) throw ConfigError("environment variable " + cfg.api_key_env + " is not set");
  return key;
}

}  // namespace

std::string chat_request_body(const PromptBundle& bundle, const LlmConfig& cfg, std::string_view repair_note) {
  nlohmann::json messages = nlohmann::json::array();
  messages.push_back({{"role", "system"}, {"content", bundle.system_text}});
  messages.push_back({{"role", "user"}, {"content", bundle.user_text}});
  if (!repair_note.empty()) messages.push_back({{"role", "user"}, {"content", std::string(repair_note)}});
  const nlohmann::json body = {
      {"model", cfg.model},
      {"temperature", cfg.temperature},
      {"messages", messages},
  };
  return body.dump();
}

std::string LlmClient::complete(const PromptBundle& bundle, std::string_view repair_note) {
  const std::string key = credential(cfg_);
  const std::string body = chat_request_body(bundle, cfg_, repair_note);

  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    LlmClient* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  httplib::Client client(cfg_.base_url);
  if (!client.is_valid()) throw ConfigError("invalid LLM base_url: " + cfg_.base_url);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg_.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_bearer_token_auth(key);

  ++sent_;
  auto res = client.Post(cfg_.path, body, "application/json");
  if (!res) throw TransportError("chat request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
}

std::string call_llm(const PromptBundle& bundle, const LlmConfig& cfg, std::string_view repair_note) {
  LlmClient client(cfg);
  return client.complete(bundle, repair_note);
}

}  // namespace heirag
