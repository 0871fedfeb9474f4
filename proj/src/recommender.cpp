#include "heirag/recommender.hpp"

#include <algorithm>
#include <cmath>

#include "heirag/error.hpp"

namespace heirag {

std::string_view to_string(ModMode m) { return m == ModMode::Add ? "add" : "swap"; }

std::optional<ModMode> parse_mode(std::string_view text) {
  if (text == "add" || text == "ADD") return ModMode::Add;
  if (text == "swap" || text == "SWAP") return ModMode::Swap;
  return std::nullopt;
}

IntakeProfile apply_modification(const IntakeProfile& x, const FoodItem& food, const Modification& m,
                                 const FoodItem* base) {
  if (!(m.portion > 0) || !std::isfinite(m.portion)) {
    throw ArgumentError("portion must be positive and finite");
  }
  IntakeProfile out = x;
  if (m.mode == ModMode::Add) {
    for (const auto& f : kIntakeFields) out.*f.member += m.portion * (food.amounts.*f.member);
  } else {
    if (!base) throw ArgumentError("SWAP modification requires a base food");
    for (const auto& f : kIntakeFields) {
      const double v = x.*f.member + m.portion * (food.amounts.*f.member - base->amounts.*f.member);
      out.*f.member = std::max(0.0, v);
    }
  }
  return clamp_hierarchy(out);
}

HeiDelta delta_hei(const IntakeProfile& x, const FoodItem& food, const Modification& m,
                   const StandardsTable& standards, const FoodItem* base) {
  HeiDelta d;
  d.modified = apply_modification(x, food, m, base);
  d.before = score_hei(x, standards);
  d.after = score_hei(d.modified, standards);
  d.delta_h = d.after.total - d.before.total;
  d.components = component_deltas(d.before, d.after);
  return d;
}

double constraint_score(const UserRecord& user, const FoodItem& food, const IntakeProfile& x,
                        const IntakeProfile& x_new, const RecommenderConfig& cfg) {
  double health = 0;
  if (user.diabetes() && food.amounts.added_sugars_g > cfg.sugar_g_max) health -= 0.5;
  if (user.cvd() && food.amounts.sodium_mg > cfg.sodium_mg_max) health -= 0.5;
  health = std::clamp(health, -1.0, 0.0);

  const double drift = std::abs(x_new.energy_kcal - x.energy_kcal);
  const double cap = cfg.energy_frac * std::max(x.energy_kcal, 500.0);
  const double energy_penalty = -std::min(1.0, drift / cap);
  return health + energy_penalty;
}

std::vector<Candidate> rank_candidates(const UserRecord& user, std::span<const ScoredFood> retrieved,
                                       const FoodIndex& index, const StandardsTable& standards,
                                       const RecommenderConfig& cfg) {
  if (cfg.portions.empty()) throw ArgumentError("rank_candidates: no portion factors configured");
  const HeiScore baseline = score_hei(user.intake, standards);

  std::vector<Candidate> out;
  out.reserve(retrieved.size());
  for (const auto& hit : retrieved) {
    const FoodItem* food = index.food(hit.food_code);
    if (!food) throw ArgumentError("rank_candidates: food_code " + std::to_string(hit.food_code) + " not in index");

    Candidate cand;
    cand.food_code = hit.food_code;
    cand.similarity = hit.similarity;
    const PortionOutcome* best = nullptr;
    cand.portions.reserve(cfg.portions.size());
    for (double s : cfg.portions) {
      const Modification m{hit.food_code, ModMode::Add, s, std::nullopt};
      const IntakeProfile modified = apply_modification(user.intake, *food, m);
      const HeiScore after = score_hei(modified, standards);
      PortionOutcome po;
      po.portion = s;
      po.delta_h = after.total - baseline.total;
      po.component_deltas = component_deltas(baseline, after);
      po.constraint = constraint_score(user, *food, user.intake, modified, cfg);
      po.utility = cfg.alpha * po.delta_h + cfg.beta * po.constraint;
      cand.portions.push_back(po);
    }
    for (const auto& po : cand.portions) {
      if (!best || po.utility > best->utility || (po.utility == best->utility && po.portion < best->portion)) {
        best = &po;
      }
    }
    cand.best_portion = best->portion;
    cand.delta_h = best->delta_h;
    cand.component_deltas = best->component_deltas;
    cand.constraint = best->constraint;
    cand.utility = best->utility;
    out.push_back(std::move(cand));
  }

  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.delta_h != b.delta_h) return a.delta_h > b.delta_h;
    return a.food_code < b.food_code;
  });
  return out;
}

Plan build_plan(const UserRecord& user, std::span<const Candidate> ranked, const FoodIndex& index,
                const StandardsTable& standards, const RecommenderConfig& cfg) {
  Plan plan;
  plan.seqn = user.seqn;
  plan.baseline_intake = user.intake;
  plan.baseline_hei = score_hei(user.intake, standards);
  plan.final_intake = user.intake;
  plan.final_hei = plan.baseline_hei;

  const double energy_cap = cfg.energy_frac * user.intake.energy_kcal;
  for (const auto& cand : ranked) {
    if (plan.steps.size() >= cfg.m_max) break;
    const FoodItem* food = index.food(cand.food_code);
    if (!food) continue;
    const Modification m{cand.food_code, ModMode::Add, cand.best_portion, std::nullopt};
    const IntakeProfile next = apply_modification(plan.final_intake, *food, m);
    if (std::abs(next.energy_kcal - user.intake.energy_kcal) > energy_cap) continue;
    const HeiScore after = score_hei(next, standards);
    const double gain = after.total - plan.final_hei.total;
    if (!(gain > cfg.eps)) continue;

    PlanStep step;
    step.modification = m;
    step.delta_h = gain;
    step.component_deltas = component_deltas(plan.final_hei, after);
    step.total_after = after.total;
    plan.steps.push_back(step);
    plan.final_intake = next;
    plan.final_hei = after;
  }
  return plan;
}

}  // namespace heirag
