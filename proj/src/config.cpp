#include "heirag/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "heirag/error.hpp"

namespace heirag {

namespace {

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'" + where);
  }
}

}  // namespace

EngineConfig EngineConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown(doc,
                 {"k_retrieve", "k_mmr", "mmr_lambda", "alpha", "beta", "portions", "eps", "energy_frac",
                  "m_max", "sugar_g_max", "sodium_mg_max", "tau", "split_ratio", "dim", "scheme",
                  "standards", "llm"},
                 "");
  EngineConfig c;
  read_key(doc, "k_retrieve", c.retrieval.k_retrieve);
  read_key(doc, "k_mmr", c.retrieval.k_mmr);
  read_key(doc, "mmr_lambda", c.retrieval.mmr_lambda);
  read_key(doc, "alpha", c.recommender.alpha);
  read_key(doc, "beta", c.recommender.beta);
  read_key(doc, "portions", c.recommender.portions);
  read_key(doc, "eps", c.recommender.eps);
  read_key(doc, "energy_frac", c.recommender.energy_frac);
  read_key(doc, "m_max", c.recommender.m_max);
  read_key(doc, "sugar_g_max", c.recommender.sugar_g_max);
  read_key(doc, "sodium_mg_max", c.recommender.sodium_mg_max);
  read_key(doc, "tau", c.evaluation.tau);
  read_key(doc, "split_ratio", c.evaluation.split_ratio);
  read_key(doc, "dim", c.dim);
  read_key(doc, "scheme", c.scheme);
  if (doc.contains("standards")) {
    std::string path;
    read_key(doc, "standards", path);
    c.standards_path = path;
  }
  if (doc.contains("llm")) {
    const auto& llm = doc.at("llm");
    if (!llm.is_object()) throw ConfigError("config key 'llm' must be an object");
    reject_unknown(llm,
                   {"enabled", "base_url", "path", "model", "temperature", "timeout_s", "max_retries",
                    "max_in_flight", "api_key_env"},
                   " in llm");
    read_key(llm, "enabled", c.llm.enabled);
    read_key(llm, "base_url", c.llm.base_url);
    read_key(llm, "path", c.llm.path);
    read_key(llm, "model", c.llm.model);
    read_key(llm, "temperature", c.llm.temperature);
    read_key(llm, "timeout_s", c.llm.timeout_s);
    read_key(llm, "max_retries", c.llm.max_retries);
    read_key(llm, "max_in_flight", c.llm.max_in_flight);
    read_key(llm, "api_key_env", c.llm.api_key_env);
  }
  c.validate();
  return c;
}

EngineConfig EngineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return from_json(doc);
}

void EngineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (retrieval.mmr_lambda < 0 || retrieval.mmr_lambda > 1) fail("mmr_lambda must be in [0, 1]");
  if (recommender.portions.empty()) fail("portions must not be empty");
  for (double s : recommender.portions) {
    if (!(s > 0) || !std::isfinite(s)) fail("portions must be positive");
  }
  if (recommender.eps < 0) fail("eps must be >= 0");
  if (!(recommender.energy_frac > 0)) fail("energy_frac must be positive");
  if (evaluation.split_ratio <= 0 || evaluation.split_ratio >= 1) fail("split_ratio must be in (0, 1)");
  if (dim < 8 || dim > 0xffff) fail("dim must be in [8, 65535]");
  if (llm.max_retries < 0) fail("llm.max_retries must be >= 0");
  if (llm.max_in_flight < 1) fail("llm.max_in_flight must be >= 1");
  if (!(llm.timeout_s > 0)) fail("llm.timeout_s must be positive");
}

nlohmann::json EngineConfig::to_json() const {
  nlohmann::json doc = {
      {"k_retrieve", retrieval.k_retrieve},
      {"k_mmr", retrieval.k_mmr},
      {"mmr_lambda", retrieval.mmr_lambda},
      {"alpha", recommender.alpha},
      {"beta", recommender.beta},
      {"portions", recommender.portions},
      {"eps", recommender.eps},
      {"energy_frac", recommender.energy_frac},
      {"m_max", recommender.m_max},
      {"sugar_g_max", recommender.sugar_g_max},
      {"sodium_mg_max", recommender.sodium_mg_max},
      {"tau", evaluation.tau},
      {"split_ratio", evaluation.split_ratio},
      {"dim", dim},
      {"scheme", scheme},
      {"llm",
       {{"enabled", llm.enabled},
        {"base_url", llm.base_url},
        {"path", llm.path},
        {"model", llm.model},
        {"temperature", llm.temperature},
        {"timeout_s", llm.timeout_s},
        {"max_retries", llm.max_retries},
        {"max_in_flight", llm.max_in_flight},
        {"api_key_env", llm.api_key_env}}},
  };
  if (standards_path) doc["standards"] = *standards_path;
  return doc;
}

}  // namespace heirag
