#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "heirag/food_corpus.hpp"
#include "heirag/recommender.hpp"
#include "heirag/retrieval.hpp"

namespace heirag {

struct LlmConfig {
  bool enabled = false;
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.2;
  double timeout_s = 30.0;
  int max_retries = 2;  // total model calls per request before falling back
  int max_in_flight = 4;
  std::string api_key_env = "HEI_LLM_API_KEY";
};

struct EvaluationConfig {
  double tau = 50.0;
  double split_ratio = 0.8;
};

/// Everything tunable, read from one flat JSON document. Keys: k_retrieve,
/// k_mmr, mmr_lambda, alpha, beta, portions, eps, energy_frac, m_max,
/// sugar_g_max, sodium_mg_max, tau, split_ratio, dim, scheme, standards
/// (path) and an "llm" object.
struct EngineConfig {
  RetrievalConfig retrieval;
  RecommenderConfig recommender;
  EvaluationConfig evaluation;
  LlmConfig llm;
  std::size_t dim = kDefaultEmbeddingDim;
  std::string scheme = std::string(kHashScheme);
  std::optional<std::string> standards_path;

  /// Defaults overridden by `doc`. Unknown keys and out-of-range values
  /// raise ConfigError.
  static EngineConfig from_json(const nlohmann::json& doc);
  static EngineConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace heirag
