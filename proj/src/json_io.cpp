#include "heirag/json_io.hpp"

#include <cmath>
#include <set>

#include "heirag/error.hpp"

namespace heirag {

namespace {

using nlohmann::json;

void require_object(const json& doc, const std::string& what) {
  if (!doc.is_object()) throw SchemaError(what + " must be a JSON object");
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& what) {
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw SchemaError("unknown field in " + what + ": " + key);
  }
}

double number_field(const json& v, const std::string& key) {
  if (!v.is_number()) throw SchemaError("field " + key + " must be a number");
  return v.get<double>();
}

json nullable(const Density& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

json intake_to_json(const IntakeProfile& x) {
  json doc = json::object();
  for (const auto& f : kIntakeFields) doc[std::string(f.name)] = x.*f.member;
  return doc;
}

IntakeProfile intake_from_json(const json& doc) {
  require_object(doc, "intake");
  std::set<std::string> known;
  for (const auto& f : kIntakeFields) known.emplace(f.name);
  reject_unknown(doc, known, "intake");
  IntakeProfile x;
  for (const auto& f : kIntakeFields) {
    const std::string key(f.name);
    if (auto it = doc.find(key); it != doc.end()) x.*f.member = number_field(*it, key);
  }
  if (auto why = intake_violation(x); !why.empty()) throw SchemaError("invalid intake: " + why);
  return x;
}

json demographics_to_json(const Demographics& d) {
  json doc = json::object();
  auto put = [&](const char* key, const auto& opt) {
    if (opt) {
      doc[key] = *opt;
    } else {
      doc[key] = nullptr;
    }
  };
  put("age_years", d.age_years);
  doc["sex"] = d.sex ? json(std::string(to_string(*d.sex))) : json(nullptr);
  put("race_eth", d.race_eth);
  put("education", d.education);
  put("income_ratio", d.income_ratio);
  put("bmi", d.bmi);
  put("flag_diabetes", d.flag_diabetes);
  put("flag_cvd", d.flag_cvd);
  doc["exclusions"] = d.exclusions;
  return doc;
}

Demographics demographics_from_json(const json& doc) {
  require_object(doc, "demographics");
  reject_unknown(doc,
                 {"age_years", "sex", "race_eth", "education", "income_ratio", "bmi", "flag_diabetes",
                  "flag_cvd", "exclusions"},
                 "demographics");
  Demographics d;
  auto num = [&](const char* key, std::optional<double>& out) {
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) out = number_field(*it, key);
  };
  auto str = [&](const char* key, std::optional<std::string>& out) {
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(std::string("field ") + key + " must be a string");
      out = it->get<std::string>();
    }
  };
  auto flag = [&](const char* key, std::optional<bool>& out) {
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) {
      if (!it->is_boolean()) throw SchemaError(std::string("field ") + key + " must be a boolean");
      out = it->get<bool>();
    }
  };
  num("age_years", d.age_years);
  num("income_ratio", d.income_ratio);
  num("bmi", d.bmi);
  str("race_eth", d.race_eth);
  str("education", d.education);
  flag("flag_diabetes", d.flag_diabetes);
  flag("flag_cvd", d.flag_cvd);
  if (auto it = doc.find("sex"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("field sex must be a string");
    d.sex = parse_sex(it->get<std::string>());
    if (!d.sex) throw SchemaError("field sex must be \"male\" or \"female\"");
  }
  if (auto it = doc.find("exclusions"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field exclusions must be an array of strings");
    std::string joined;
    for (const auto& t : *it) {
      if (!t.is_string()) throw SchemaError("field exclusions must be an array of strings");
      joined += t.get<std::string>() + ";";
    }
    d.exclusions = split_tags(joined);
  }
  return d;
}

json user_to_json(const UserRecord& u) {
  json days = json::array();
  for (const auto& d : u.days) days.push_back(intake_to_json(d));
  return {{"seqn", u.seqn},
          {"demographics", demographics_to_json(u.demo)},
          {"intake", intake_to_json(u.intake)},
          {"days", days}};
}

UserRecord user_from_json(const json& doc) {
  require_object(doc, "user");
  reject_unknown(doc, {"seqn", "demographics", "intake", "days"}, "user");
  UserRecord u;
  const auto seqn = doc.find("seqn");
  if (seqn == doc.end() || !seqn->is_number_integer()) throw SchemaError("field seqn must be an integer");
  u.seqn = seqn->get<Seqn>();
  if (u.seqn <= 0) throw SchemaError("field seqn must be positive");
  if (auto it = doc.find("demographics"); it != doc.end()) u.demo = demographics_from_json(*it);
  if (auto it = doc.find("days"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field days must be an array");
    if (it->size() > 2) throw SchemaError("at most two recall days are supported");
    for (const auto& d : *it) u.days.push_back(intake_from_json(d));
  }
  const auto intake = doc.find("intake");
  if (intake != doc.end() && !intake->is_null()) {
    u.intake = intake_from_json(*intake);
  } else if (!u.days.empty()) {
    u.intake = mean_profile(u.days);
  } else {
    throw SchemaError("user needs an intake or at least one recall day");
  }
  return u;
}

json hei_to_json(const HeiScore& h, const StandardsTable& standards) {
  json comps = json::array();
  for (Component c : kAllComponents) {
    const auto& cs = h[c];
    comps.push_back({{"id", std::string(component_id(c))},
                     {"name", std::string(component_name(c))},
                     {"value", nullable(cs.value)},
                     {"points", cs.points},
                     {"max_points", standards[c].max_points}});
  }
  return {{"total", h.total}, {"components", comps}};
}

json deltas_to_json(const ComponentDeltas& d) {
  json doc = json::object();
  for (Component c : kAllComponents) doc[std::string(component_id(c))] = d[index_of(c)];
  return doc;
}

json modification_to_json(const Modification& m) {
  json doc = {{"food_code", m.food_code}, {"mode", std::string(to_string(m.mode))}, {"portion", m.portion}};
  if (m.swap_base) doc["swap_base"] = *m.swap_base;
  return doc;
}

json plan_to_json(const Plan& p, const StandardsTable& standards) {
  json steps = json::array();
  for (const auto& s : p.steps) {
    steps.push_back({{"modification", modification_to_json(s.modification)},
                     {"delta_h", s.delta_h},
                     {"component_deltas", deltas_to_json(s.component_deltas)},
                     {"total_after", s.total_after}});
  }
  return {{"seqn", p.seqn},
          {"steps", steps},
          {"baseline_total", p.baseline_hei.total},
          {"final_hei", hei_to_json(p.final_hei, standards)},
          {"improvement", p.improvement()},
          {"energy_before", p.baseline_intake.energy_kcal},
          {"energy_after", p.final_intake.energy_kcal}};
}

json candidate_to_json(const Candidate& c, const FoodIndex& index) {
  const FoodItem* food = index.food(c.food_code);
  json portions = json::array();
  for (const auto& o : c.portions) {
    portions.push_back({{"portion", o.portion},
                        {"delta_h", o.delta_h},
                        {"constraint", o.constraint},
                        {"utility", o.utility}});
  }
  return {{"food_code", c.food_code},
          {"description", food ? food->description : std::string()},
          {"similarity", c.similarity},
          {"best_portion", c.best_portion},
          {"delta_h", c.delta_h},
          {"constraint", c.constraint},
          {"utility", c.utility},
          {"component_deltas", deltas_to_json(c.component_deltas)},
          {"portions", portions}};
}

json grounded_to_json(const GroundedRecommendation& r) {
  json cited = json::array();
  for (Component c : r.cited_components) cited.push_back(std::string(component_name(c)));
  return {{"food_code", r.food_code},
          {"portion", r.portion},
          {"rationale", r.rationale},
          {"cited_components", cited},
          {"anticipated_delta", r.anticipated_delta}};
}

json food_to_json(const FoodItem& f) {
  return {{"food_code", f.food_code},
          {"description", f.description},
          {"serving_desc", f.serving_desc},
          {"tags", f.tags},
          {"amounts", intake_to_json(f.amounts)}};
}

}  // namespace heirag
