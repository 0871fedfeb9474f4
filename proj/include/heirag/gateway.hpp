#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "heirag/config.hpp"
#include "heirag/explainer.hpp"
#include "heirag/food_corpus.hpp"
#include "heirag/ingest.hpp"
#include "heirag/pipeline.hpp"

namespace heirag {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string persons_path;
  std::string index_dir;
  std::optional<std::string> config_path;
  /// Append-only JSON-lines file for users added over HTTP. Defaults to
  /// "<persons_path>.posted.jsonl".
  std::optional<std::string> store_path;
  /// Directory served under /app when set.
  std::optional<std::string> static_dir;
  bool llm_enabled = false;

  /// Keys: host, port, persons, index, config, store, static_dir,
  /// llm_enabled. Unknown keys raise ConfigError.
  static ServiceConfig from_json(const nlohmann::json& doc);
  static ServiceConfig load(const std::string& path);
  /// Throws ConfigError when a referenced path is missing or the port is
  /// out of range.
  void validate() const;
  std::filesystem::path resolved_store_path() const;
};

/// Status plus JSON body. Errors carry {"code", "message"}.
struct Response {
  int status = 200;
  nlohmann::json body;
};

Response error_response(int status, std::string_view code, std::string_view message);

/// The request handlers, independent of the HTTP layer.
///
/// The index and engine are immutable after construction. The person store
/// is guarded by a shared mutex; add_user is the only writer.
class Service {
 public:
  /// `store` is replayed on construction when it exists. `chat` overrides
  /// the HTTP client used when cfg.llm.enabled is set.
  Service(FoodIndex index, std::vector<UserRecord> users, EngineConfig cfg, StandardsTable standards,
          std::optional<std::filesystem::path> store = std::nullopt, ChatFn chat = {});

  static std::unique_ptr<Service> load(const ServiceConfig& sc);

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response health() const;
  Response add_user(const nlohmann::json& body);
  Response user_hei(Seqn seqn) const;
  Response recommend(Seqn seqn, std::optional<std::size_t> k = std::nullopt) const;
  Response whatif(const nlohmann::json& body) const;
  Response search_foods(std::string_view query, std::size_t k) const;
  Response evaluate(const nlohmann::json& body) const;

  std::size_t user_count() const;
  std::optional<UserRecord> user(Seqn seqn) const;
  const FoodIndex& index() const noexcept { return index_; }
  const RecommendationEngine& engine() const noexcept { return engine_; }
  /// Requests sent by the built-in LLM client (0 when a ChatFn was injected).
  std::size_t llm_requests() const;

 private:
  void replay_store();

  FoodIndex index_;
  RecommendationEngine engine_;
  std::optional<std::filesystem::path> store_;
  std::unique_ptr<LlmClient> client_;
  ChatFn chat_;

  mutable std::shared_mutex mu_;
  std::map<Seqn, UserRecord> users_;
};

/// HTTP front end over a Service.
class HttpGateway {
 public:
  HttpGateway(Service& service, std::optional<std::string> static_dir = std::nullopt);
  ~HttpGateway();

  HttpGateway(const HttpGateway&) = delete;
  HttpGateway& operator=(const HttpGateway&) = delete;

  /// Binds without serving yet. Port 0 picks a free port. Returns the bound
  /// port; throws TransportError when binding fails.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop(). Blocks.
  void listen();
  /// listen() on a background thread; returns once the server is running.
  void start();
  void stop();
  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace heirag
