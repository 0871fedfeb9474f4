#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heirag/food_corpus.hpp"
#include "heirag/hei.hpp"
#include "heirag/ingest.hpp"

namespace heirag {

/// Maps a query text to a vector in the index's embedding space.
using QueryEncoder = std::function<EmbeddingVector(std::string_view)>;

/// Encoder for the built-in hashing scheme at the given dimension.
QueryEncoder hash_encoder(std::size_t dim = kDefaultEmbeddingDim);

/// Encoder matching an index's scheme. Throws ConfigError for schemes with
/// no local text encoder (e.g. externally computed vectors).
QueryEncoder encoder_for(const FoodIndex& index);

struct QueryContext {
  Seqn seqn = 0;
  std::string query_text;
  EmbeddingVector vector;
  /// Components scoring below half their maximum, weakest first.
  std::vector<Component> deficit_components;
};

struct ScoredFood {
  FoodCode food_code = 0;
  double similarity = 0;

  bool operator==(const ScoredFood&) const = default;
};

struct RetrievalConfig {
  std::size_t k_retrieve = 50;
  std::size_t k_mmr = 25;
  double mmr_lambda = 0.7;
};

/// Components below 50% of their maximum, sorted by score fraction then by
/// reporting order.
std::vector<Component> deficit_components(const HeiScore& hei, const StandardsTable& standards);

/// Text used when the profile has no deficits and no health flags.
inline constexpr std::string_view kBalancedQuery = "balanced diet variety";

QueryContext build_query(const UserRecord& user, const HeiScore& hei,
                         const StandardsTable& standards, const QueryEncoder& encoder);

/// Exact top-k by inner product (rows and query are unit-norm, so this is
/// cosine similarity). Ties go to the smaller food code.
/// Throws ArgumentError unless 1 <= k <= index.size().
std::vector<ScoredFood> search(const FoodIndex& index, std::span<const float> query, std::size_t k);

/// Greedy maximal-marginal-relevance selection of k items from `candidates`.
/// Relevance is the candidate's stored similarity; redundancy is the largest
/// cosine to any already-selected item.
std::vector<ScoredFood> mmr_rerank(std::span<const ScoredFood> candidates, const FoodIndex& index,
                                   double lambda, std::size_t k);

/// Drops foods carrying any of the excluded tags.
std::vector<ScoredFood> filter_exclusions(std::span<const ScoredFood> candidates,
                                          const FoodIndex& index,
                                          std::span<const std::string> exclusions);

/// search -> MMR -> exclusion filter, with fan-out clamped to the index
/// size. An empty index yields no candidates.
std::vector<ScoredFood> retrieve(const FoodIndex& index, const QueryContext& query,
                                 std::span<const std::string> exclusions,
                                 const RetrievalConfig& cfg);

/// Inner product accumulated in double.
double dot(std::span<const float> a, std::span<const float> b);

}  // namespace heirag
