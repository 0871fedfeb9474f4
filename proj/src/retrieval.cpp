#include "heirag/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "heirag/error.hpp"

namespace heirag {

namespace {

// Strict weak order: higher similarity first, then smaller code.
bool ranks_before(const ScoredFood& a, const ScoredFood& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.food_code < b.food_code;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

QueryEncoder hash_encoder(std::size_t dim) {
  return [dim](std::string_view text) { return embed_text(text, dim, kHashScheme); };
}

QueryEncoder encoder_for(const FoodIndex& index) {
  if (index.scheme_id() == kHashScheme) return hash_encoder(index.dim());
  throw ConfigError("no local query encoder for embedding scheme '" + index.scheme_id() + "'");
}

std::vector<Component> deficit_components(const HeiScore& hei, const StandardsTable& standards) {
  std::vector<std::pair<double, Component>> weak;
  for (auto c : kAllComponents) {
    const double frac = hei.points(c) / standards[c].max_points;
    if (frac < 0.5) weak.emplace_back(frac, c);
  }
  std::stable_sort(weak.begin(), weak.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Component> out;
  for (const auto& [_, c] : weak) out.push_back(c);
  return out;
}

QueryContext build_query(const UserRecord& user, const HeiScore& hei,
                         const StandardsTable& standards, const QueryEncoder& encoder) {
  QueryContext q;
  q.seqn = user.seqn;
  q.deficit_components = deficit_components(hei, standards);

  std::vector<std::string> phrases;
  for (auto c : q.deficit_components) {
    // A low moderation score means too much of the component.
    const bool too_much = standards[c].kind == ScoreKind::Moderation;
    phrases.push_back(std::string(too_much ? "needs less " : "needs more ") +
                      lowercase(component_name(c)));
  }
  if (user.diabetes()) phrases.emplace_back("low added sugar");
  if (user.cvd()) phrases.emplace_back("low sodium");

  if (phrases.empty()) {
    q.query_text = std::string(kBalancedQuery);
  } else {
    for (std::size_t i = 0; i < phrases.size(); ++i) {
      if (i) q.query_text += ", ";
      q.query_text += phrases[i];
    }
  }
  q.vector = encoder(q.query_text);
  return q;
}

std::vector<ScoredFood> search(const FoodIndex& index, std::span<const float> query, std::size_t k) {
  if (k < 1 || k > index.size()) {
    throw ArgumentError("search: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(index.size()) + "]");
  }
  if (query.size() != index.dim()) throw ArgumentError("search: query dimension mismatch");
  std::vector<ScoredFood> all;
  all.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    all.push_back({index.item(i).food_code, dot(query, index.row(i))});
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), ranks_before);
  all.resize(k);
  return all;
}

std::vector<ScoredFood> mmr_rerank(std::span<const ScoredFood> candidates, const FoodIndex& index,
                                   double lambda, std::size_t k) {
  if (lambda < 0 || lambda > 1) throw ArgumentError("mmr_rerank: lambda outside [0, 1]");
  if (k > candidates.size()) throw ArgumentError("mmr_rerank: k exceeds candidate count");

  std::vector<std::span<const float>> rows;
  rows.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto r = index.find(c.food_code);
    if (!r) throw ArgumentError("mmr_rerank: food_code " + std::to_string(c.food_code) + " not in index");
    rows.push_back(index.row(*r));
  }

  std::vector<ScoredFood> out;
  out.reserve(k);
  std::vector<bool> taken(candidates.size(), false);
  // Largest similarity to anything selected so far, per candidate.
  std::vector<double> redundancy(candidates.size(), -std::numeric_limits<double>::infinity());

  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = candidates.size();
    double best_score = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      // First pick is pure relevance.
      const double score = step == 0 ? candidates[i].similarity
                                     : lambda * candidates[i].similarity - (1 - lambda) * redundancy[i];
      if (best == candidates.size() || score > best_score ||
          (score == best_score && candidates[i].food_code < candidates[best].food_code)) {
        best = i;
        best_score = score;
      }
    }
    taken[best] = true;
    out.push_back(candidates[best]);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!taken[i]) redundancy[i] = std::max(redundancy[i], dot(rows[i], rows[best]));
    }
  }
  return out;
}

std::vector<ScoredFood> filter_exclusions(std::span<const ScoredFood> candidates,
                                          const FoodIndex& index,
                                          std::span<const std::string> exclusions) {
  std::vector<ScoredFood> out;
  for (const auto& c : candidates) {
    const FoodItem* f = index.food(c.food_code);
    if (!f) continue;
    const bool excluded = std::any_of(exclusions.begin(), exclusions.end(), [&](const auto& tag) {
      return std::binary_search(f->tags.begin(), f->tags.end(), tag);
    });
    if (!excluded) out.push_back(c);
  }
  return out;
}

std::vector<ScoredFood> retrieve(const FoodIndex& index, const QueryContext& query,
                                 std::span<const std::string> exclusions,
                                 const RetrievalConfig& cfg) {
  if (index.empty() || cfg.k_retrieve == 0 || cfg.k_mmr == 0) return {};
  const auto hits = search(index, query.vector.view(), std::min(cfg.k_retrieve, index.size()));
  const auto diverse = mmr_rerank(hits, index, cfg.mmr_lambda, std::min(cfg.k_mmr, hits.size()));
  return filter_exclusions(diverse, index, exclusions);
}

}  // namespace heirag
