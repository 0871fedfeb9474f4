#include "heirag/explainer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "heirag/error.hpp"

namespace heirag {

namespace {

constexpr double kPortionTolerance = 1e-9;

bool same_portion(double a, double b) { return std::abs(a - b) <= kPortionTolerance; }

std::string format_portions(std::span<const double> portions) {
  std::string out = "[";
  for (std::size_t i = 0; i < portions.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", portions[i]);
    out += (i ? ", " : "");
    out += buf;
  }
  return out + "]";
}

std::string system_prompt(std::span<const double> portions) {
  std::string names;
  for (auto c : kAllComponents) {
    if (!names.empty()) names += ", ";
    names += component_name(c);
  }
  return "You are a dietitian assistant that explains food recommendations in terms of the "
         "Healthy Eating Index (HEI-2020).\n"
         "Rules:\n"
         "1. Recommend foods ONLY from the candidate list, identified by their food_code. Never "
         "mention or invent any other food.\n"
         "2. Use only these portion sizes (servings): " +
         format_portions(portions) +
         ".\n"
         "3. Justify each recommendation with the HEI components it improves and the user's "
         "health constraints. Do not state numeric HEI changes; the system attaches them.\n"
         "4. Respond with a single JSON object and nothing else, using exactly this schema:\n"
         "{\"recommendations\": [{\"food_code\": <integer>, \"portion\": <number>, "
         "\"rationale\": \"<one or two sentences>\", \"cited_components\": [\"<component "
         "name>\"]}]}\n"
         "Valid component names: " +
         names + ".";
}

std::string strip_fences(std::string_view raw) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  raw = trim(raw);
  if (raw.starts_with("```") && raw.ends_with("```") && raw.size() >= 6) {
    raw.remove_prefix(3);
    raw.remove_suffix(3);
    if (raw.starts_with("json")) raw.remove_prefix(4);
    raw = trim(raw);
  }
  return std::string(raw);
}

}  // namespace

bool PromptBundle::allows(FoodCode code) const {
  return std::binary_search(allowed_codes.begin(), allowed_codes.end(), code);
}

const PromptCandidate* PromptBundle::candidate(FoodCode code) const {
  for (const auto& c : candidates) {
    if (c.food_code == code) return &c;
  }
  return nullptr;
}

PromptBundle assemble_prompt(const UserRecord& user, const HeiScore& hei,
                             std::span<const Candidate> candidates, const FoodIndex& index,
                             const StandardsTable& standards, const RecommenderConfig& cfg,
                             const Plan* plan) {
  if (candidates.empty()) throw ArgumentError("assemble_prompt: no candidates");

  PromptBundle b;
  b.allowed_portions = cfg.portions;
  for (const auto& cand : candidates) {
    const FoodItem* food = index.food(cand.food_code);
    if (!food) throw ArgumentError("assemble_prompt: food_code " + std::to_string(cand.food_code) + " not in index");
    PromptCandidate pc;
    pc.food_code = cand.food_code;
    pc.description = food->description;
    pc.text = render_food_text(*food);
    for (const auto& po : cand.portions) pc.portion_deltas.emplace_back(po.portion, po.delta_h);
    pc.component_deltas = cand.component_deltas;
    if (plan) {
      for (const auto& step : plan->steps) {
        if (step.modification.food_code == cand.food_code) {
          pc.plan_portion = step.modification.portion;
          pc.plan_delta = step.delta_h;
        }
      }
    }
    if (b.candidate(pc.food_code)) {
      throw ArgumentError("assemble_prompt: duplicate candidate " + std::to_string(pc.food_code));
    }
    b.allowed_codes.push_back(pc.food_code);
    b.candidates.push_back(std::move(pc));
  }
  std::sort(b.allowed_codes.begin(), b.allowed_codes.end());

  nlohmann::ordered_json profile = {
      {"energy_kcal", user.intake.energy_kcal},
      {"hei_total", hei.total},
      {"diabetes", user.diabetes()},
      {"cardiovascular_disease", user.cvd()},
      {"avoids", user.demo.exclusions},
  };
  if (user.demo.age_years) profile["age_years"] = *user.demo.age_years;
  if (user.demo.sex) profile["sex"] = to_string(*user.demo.sex);
  if (user.demo.bmi) profile["bmi"] = *user.demo.bmi;

  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (auto c : kAllComponents) {
    table.push_back({{"component", component_name(c)},
                     {"points", hei.points(c)},
                     {"max_points", standards[c].max_points}});
  }

  nlohmann::ordered_json foods = nlohmann::ordered_json::array();
  for (const auto& pc : b.candidates) {
    nlohmann::ordered_json portions = nlohmann::ordered_json::array();
    for (const auto& [s, d] : pc.portion_deltas) portions.push_back({{"portion", s}, {"delta_hei", d}});
    nlohmann::ordered_json deltas = nlohmann::ordered_json::object();
    for (auto c : kAllComponents) {
      const double d = pc.component_deltas[index_of(c)];
      if (d != 0) deltas[std::string(component_name(c))] = d;
    }
    foods.push_back({{"food_code", pc.food_code},
                     {"description", pc.description},
                     {"text", pc.text},
                     {"portions", portions},
                     {"component_deltas", deltas}});
  }

  b.system_text = system_prompt(b.allowed_portions);
  b.user_text = "User profile:\n" + profile.dump(2) + "\n\nHEI-2020 components:\n" + table.dump(2) +
                "\n\nCandidate foods:\n" + foods.dump(2) +
                "\n\nRecommend foods from the candidate list and return the JSON object.";
  return b;
}

std::vector<GroundedRecommendation> validate_grounding(std::string_view raw, const PromptBundle& bundle) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(strip_fences(raw));
  } catch (const nlohmann::json::exception& e) {
    throw GroundingError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("recommendations") || !doc["recommendations"].is_array()) {
    throw GroundingError("response must be an object with a 'recommendations' array");
  }
  const auto& recs = doc["recommendations"];
  if (recs.empty()) throw GroundingError("response contains no recommendations");
  if (recs.size() > bundle.allowed_codes.size()) {
    throw GroundingError("response has " + std::to_string(recs.size()) + " recommendations, at most " +
                         std::to_string(bundle.allowed_codes.size()) + " allowed");
  }

  std::vector<GroundedRecommendation> out;
  std::set<FoodCode> seen;
  for (const auto& r : recs) {
    if (!r.is_object()) throw GroundingError("recommendation entries must be objects");
    if (!r.contains("food_code") || !r["food_code"].is_number_integer()) {
      throw GroundingError("food_code must be an integer");
    }
    GroundedRecommendation g;
    g.food_code = r["food_code"].get<FoodCode>();
    if (!bundle.allows(g.food_code)) {
      throw GroundingError("food_code " + std::to_string(g.food_code) + " is not in the candidate set");
    }
    if (!seen.insert(g.food_code).second) {
      throw GroundingError("food_code " + std::to_string(g.food_code) + " recommended twice");
    }

    if (!r.contains("portion") || !r["portion"].is_number()) throw GroundingError("portion must be a number");
    const double portion = r["portion"].get<double>();
    auto allowed = std::find_if(bundle.allowed_portions.begin(), bundle.allowed_portions.end(),
                                [&](double s) { return same_portion(s, portion); });
    if (allowed == bundle.allowed_portions.end()) {
      throw GroundingError("portion " + nlohmann::json(portion).dump() + " is not an allowed portion");
    }
    g.portion = *allowed;

    if (!r.contains("rationale") || !r["rationale"].is_string() || r["rationale"].get<std::string>().empty()) {
      throw GroundingError("rationale must be a non-empty string");
    }
    g.rationale = r["rationale"].get<std::string>();

    if (r.contains("cited_components")) {
      if (!r["cited_components"].is_array()) throw GroundingError("cited_components must be an array");
      for (const auto& name : r["cited_components"]) {
        auto c = name.is_string() ? parse_component(name.get<std::string>()) : std::nullopt;
        if (!c) throw GroundingError("unknown HEI component " + name.dump());
        if (std::find(g.cited_components.begin(), g.cited_components.end(), *c) == g.cited_components.end()) {
          g.cited_components.push_back(*c);
        }
      }
    }

    const PromptCandidate* pc = bundle.candidate(g.food_code);
    if (!pc) throw GroundingError("food_code " + std::to_string(g.food_code) + " has no candidate data");
    if (pc->plan_portion && same_portion(*pc->plan_portion, g.portion)) {
      g.anticipated_delta = *pc->plan_delta;
    } else {
      auto it = std::find_if(pc->portion_deltas.begin(), pc->portion_deltas.end(),
                             [&](const auto& p) { return same_portion(p.first, g.portion); });
      if (it == pc->portion_deltas.end()) {
        throw GroundingError("no projected change for food_code " + std::to_string(g.food_code) +
                             " at the requested portion");
      }
      g.anticipated_delta = it->second;
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroundedRecommendation> fallback_explain(const Plan& plan, const FoodIndex& index) {
  std::vector<GroundedRecommendation> out;
  for (const auto& step : plan.steps) {
    const FoodItem* food = index.food(step.modification.food_code);
    const std::string name = food ? food->description : "food " + std::to_string(step.modification.food_code);

    // The component with the largest gain names the improvement.
    Component top = kAllComponents.front();
    double top_gain = -std::numeric_limits<double>::infinity();
    for (auto c : kAllComponents) {
      if (step.component_deltas[index_of(c)] > top_gain) {
        top_gain = step.component_deltas[index_of(c)];
        top = c;
      }
    }
    char delta[32];
    std::snprintf(delta, sizeof delta, "%+.2f", step.delta_h);

    GroundedRecommendation g;
    g.food_code = step.modification.food_code;
    g.portion = step.modification.portion;
    g.rationale = "Adds " + name + ": improves " + std::string(component_name(top)) + " (" + delta +
                  " HEI points)";
    g.cited_components = {top};
    g.anticipated_delta = step.delta_h;
    out.push_back(std::move(g));
  }
  return out;
}

Explanation explain(const PromptBundle& bundle, const Plan& plan, const FoodIndex& index,
                    const LlmConfig& cfg, const ChatFn& chat) {
  Explanation ex;
  if (cfg.enabled && chat) {
    std::string repair;
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      std::string raw;
      try {
        ++ex.llm_calls;
        raw = chat(bundle, repair);
      } catch (const ConfigError& e) {
        // No request was made; retrying cannot help.
        --ex.llm_calls;
        ex.failures.emplace_back(e.what());
        break;
      } catch (const TransportError& e) {
        ex.failures.emplace_back(e.what());
        continue;
      }
      try {
        ex.recommendations = validate_grounding(raw, bundle);
        ex.from_llm = true;
        return ex;
      } catch (const GroundingError& e) {
        ex.failures.emplace_back(e.what());
        repair = std::string("Your previous answer was rejected: ") + e.what() +
                 ". Answer again using only the listed food codes and portions.";
      }
    }
  }
  ex.recommendations = fallback_explain(plan, index);
  ex.from_llm = false;
  return ex;
}

}  // namespace heirag
