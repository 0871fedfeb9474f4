#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "heirag/food_corpus.hpp"
#include "heirag/hei.hpp"
#include "heirag/ingest.hpp"
#include "heirag/retrieval.hpp"

namespace heirag {

enum class ModMode { Add, Swap };

std::string_view to_string(ModMode m);
std::optional<ModMode> parse_mode(std::string_view text);

/// A hypothetical change to an intake: add `portion` servings of a food, or
/// swap `portion` servings of `swap_base` for it.
struct Modification {
  FoodCode food_code = 0;
  ModMode mode = ModMode::Add;
  double portion = 1.0;
  std::optional<FoodCode> swap_base;

  bool operator==(const Modification&) const = default;
};

using ComponentDeltas = std::array<double, kComponentCount>;

struct RecommenderConfig {
  double alpha = 1.0;
  double beta = 2.0;
  std::vector<double> portions{0.5, 1.0, 1.5};
  double eps = 0.0;
  double energy_frac = 0.15;
  std::size_t m_max = 3;
  double sugar_g_max = 10.0;
  double sodium_mg_max = 500.0;
};

/// ADD: x + s*food. SWAP: x + s*(food - base), clamped at zero. Subgroups
/// are re-clamped to their parent groups in both modes.
/// Throws ArgumentError for SWAP without a base or a non-positive portion.
IntakeProfile apply_modification(const IntakeProfile& x, const FoodItem& food, const Modification& m,
                                 const FoodItem* base = nullptr);

struct HeiDelta {
  double delta_h = 0;
  ComponentDeltas components{};
  HeiScore before;
  HeiScore after;
  IntakeProfile modified;
};

HeiDelta delta_hei(const IntakeProfile& x, const FoodItem& food, const Modification& m,
                   const StandardsTable& standards = StandardsTable::defaults(),
                   const FoodItem* base = nullptr);

/// Health compatibility plus energy penalty, in [-2, 0].
double constraint_score(const UserRecord& user, const FoodItem& food, const IntakeProfile& x,
                        const IntakeProfile& x_new, const RecommenderConfig& cfg);

struct PortionOutcome {
  double portion = 0;
  double delta_h = 0;
  ComponentDeltas component_deltas{};
  double constraint = 0;
  double utility = 0;
};

struct Candidate {
  FoodCode food_code = 0;
  double similarity = 0;
  // Values at best_portion.
  double delta_h = 0;
  ComponentDeltas component_deltas{};
  double constraint = 0;
  double utility = 0;
  double best_portion = 1.0;
  std::vector<PortionOutcome> portions;  // one per configured portion, in config order
};

/// Evaluates every portion in ADD mode against the user's averaged intake and
/// sorts by utility, then delta_h, then food code.
std::vector<Candidate> rank_candidates(const UserRecord& user, std::span<const ScoredFood> retrieved,
                                       const FoodIndex& index, const StandardsTable& standards,
                                       const RecommenderConfig& cfg);

struct PlanStep {
  Modification modification;
  double delta_h = 0;  // on the running profile
  ComponentDeltas component_deltas{};
  double total_after = 0;
};

struct Plan {
  Seqn seqn = 0;
  std::vector<PlanStep> steps;
  IntakeProfile baseline_intake;
  HeiScore baseline_hei;
  HeiScore final_hei;
  IntakeProfile final_intake;

  double improvement() const { return final_hei.total - baseline_hei.total; }
};

/// Greedy acceptance in ranked order, re-scoring each candidate at its best
/// portion on the running profile. A step is kept when its gain exceeds
/// eps and cumulative energy drift stays within energy_frac of baseline.
Plan build_plan(const UserRecord& user, std::span<const Candidate> ranked, const FoodIndex& index,
                const StandardsTable& standards, const RecommenderConfig& cfg);

}  // namespace heirag
