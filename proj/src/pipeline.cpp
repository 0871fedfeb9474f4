#include "heirag/pipeline.hpp"

namespace heirag {

RecommendationEngine::RecommendationEngine(const FoodIndex& index, EngineConfig cfg,
                                           StandardsTable standards, QueryEncoder encoder)
    : index_(index), cfg_(std::move(cfg)), standards_(std::move(standards)), encoder_(std::move(encoder)) {
  if (!encoder_ && !index_.empty()) encoder_ = encoder_for(index_);
}

Recommendation RecommendationEngine::recommend(const UserRecord& user,
                                               std::optional<std::size_t> k_offer) const {
  Recommendation rec;
  rec.baseline_hei = score_hei(user.intake, standards_);
  if (!index_.empty()) {
    rec.query = build_query(user, rec.baseline_hei, standards_, encoder_);
    RetrievalConfig rc = cfg_.retrieval;
    if (k_offer) rc.k_mmr = *k_offer;
    rec.retrieved = retrieve(index_, rec.query, user.demo.exclusions, rc);
    rec.ranked = rank_candidates(user, rec.retrieved, index_, standards_, cfg_.recommender);
  } else {
    rec.query.seqn = user.seqn;
  }
  rec.plan = build_plan(user, rec.ranked, index_, standards_, cfg_.recommender);
  return rec;
}

StandardsTable standards_for(const EngineConfig& cfg) {
  if (cfg.standards_path) return StandardsTable::load(*cfg.standards_path);
  return StandardsTable::defaults();
}

}  // namespace heirag
