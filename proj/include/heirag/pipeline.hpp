#pragma once

#include <optional>
#include <vector>

#include "heirag/config.hpp"
#include "heirag/food_corpus.hpp"
#include "heirag/hei.hpp"
#include "heirag/recommender.hpp"
#include "heirag/retrieval.hpp"

namespace heirag {

struct Recommendation {
  HeiScore baseline_hei;  // of the averaged intake, as the plan sees it
  QueryContext query;
  std::vector<ScoredFood> retrieved;  // after MMR and the exclusion filter
  std::vector<Candidate> ranked;
  Plan plan;
};

/// query -> search -> MMR -> exclusion filter -> rank -> plan, for one user.
///
/// Holds a reference to the index; the index must outlive the engine.
/// recommend() is const and safe to call from several threads.
class RecommendationEngine {
 public:
  RecommendationEngine(const FoodIndex& index, EngineConfig cfg, StandardsTable standards,
                       QueryEncoder encoder = {});

  /// `k_offer` overrides the MMR output size (the number of foods offered).
  Recommendation recommend(const UserRecord& user, std::optional<std::size_t> k_offer = std::nullopt) const;

  const FoodIndex& index() const noexcept { return index_; }
  const EngineConfig& config() const noexcept { return cfg_; }
  const StandardsTable& standards() const noexcept { return standards_; }
  const QueryEncoder& encoder() const noexcept { return encoder_; }

 private:
  const FoodIndex& index_;
  EngineConfig cfg_;
  StandardsTable standards_;
  QueryEncoder encoder_;
};

/// Standards from cfg.standards_path, or the defaults.
StandardsTable standards_for(const EngineConfig& cfg);

}  // namespace heirag
