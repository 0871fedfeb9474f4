#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heirag/config.hpp"
#include "heirag/hei.hpp"
#include "heirag/recommender.hpp"

namespace heirag {

/// One food offered to the model, with the recommender's numbers.
struct PromptCandidate {
  FoodCode food_code = 0;
  std::string description;
  std::string text;
  /// (portion, delta_h) against the baseline intake, one per allowed portion.
  std::vector<std::pair<double, double>> portion_deltas;
  ComponentDeltas component_deltas{};  // at the best portion
  /// Set when the food is an accepted plan step: its portion and its gain on
  /// the running profile.
  std::optional<double> plan_portion;
  std::optional<double> plan_delta;

  bool operator==(const PromptCandidate&) const = default;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::vector<FoodCode> allowed_codes;  // ascending
  std::vector<double> allowed_portions;
  std::vector<PromptCandidate> candidates;

  bool allows(FoodCode code) const;
  const PromptCandidate* candidate(FoodCode code) const;

  bool operator==(const PromptBundle&) const = default;
};

struct GroundedRecommendation {
  FoodCode food_code = 0;
  double portion = 1.0;
  std::string rationale;
  std::vector<Component> cited_components;
  /// Copied from the recommender, never taken from model text.
  double anticipated_delta = 0;
};

/// Builds the constrained prompt. When `plan` is given, candidates that are
/// plan steps carry their step portion and gain. Throws ArgumentError when
/// `candidates` is empty.
PromptBundle assemble_prompt(const UserRecord& user, const HeiScore& hei,
                             std::span<const Candidate> candidates, const FoodIndex& index,
                             const StandardsTable& standards, const RecommenderConfig& cfg,
                             const Plan* plan = nullptr);

/// Parses a model response against the bundle. Throws GroundingError for
/// malformed JSON, codes outside the allowed set, unknown portions or
/// component names, duplicates, or an empty/oversized list.
std::vector<GroundedRecommendation> validate_grounding(std::string_view raw, const PromptBundle& bundle);

/// Template explanation for each plan step: "Adds <food>: improves
/// <component> (+<gain> HEI points)".
std::vector<GroundedRecommendation> fallback_explain(const Plan& plan, const FoodIndex& index);

/// Chat-completions client. Limits concurrent requests to
/// cfg.max_in_flight and counts outbound requests.
class LlmClient {
 public:
  explicit LlmClient(LlmConfig cfg) : cfg_(std::move(cfg)) {}

  /// One request with the bundle's system and user messages, plus a repair
  /// message when `repair_note` is non-empty. Returns the first choice's
  /// content. Throws ConfigError when the credential variable is unset (no
  /// request is made) and TransportError on network/timeout/non-2xx.
  std::string complete(const PromptBundle& bundle, std::string_view repair_note = {});

  const LlmConfig& config() const noexcept { return cfg_; }
  std::size_t requests_sent() const noexcept { return sent_.load(); }

 private:
  LlmConfig cfg_;
  std::atomic<std::size_t> sent_{0};
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

/// Single request with a throwaway client.
std::string call_llm(const PromptBundle& bundle, const LlmConfig& cfg, std::string_view repair_note = {});

/// Request body sent to the chat-completions endpoint.
std::string chat_request_body(const PromptBundle& bundle, const LlmConfig& cfg, std::string_view repair_note);

using ChatFn = std::function<std::string(const PromptBundle&, std::string_view repair_note)>;

struct Explanation {
  std::vector<GroundedRecommendation> recommendations;
  bool from_llm = false;
  int llm_calls = 0;
  std::vector<std::string> failures;  // one message per failed attempt
};

/// Tries the model up to cfg.max_retries times (a grounding failure feeds
/// its message back as a repair note), then falls back to the template.
/// With cfg.enabled false the template is used directly.
Explanation explain(const PromptBundle& bundle, const Plan& plan, const FoodIndex& index,
                    const LlmConfig& cfg, const ChatFn& chat);

}  // namespace heirag
