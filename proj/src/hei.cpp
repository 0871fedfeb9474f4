#include "heirag/hei.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "heirag/error.hpp"
#include "heirag/ingest.hpp"

namespace heirag {

namespace {

struct ComponentInfo {
  std::string_view id;
  std::string_view name;
};

constexpr std::array<ComponentInfo, kComponentCount> kInfo{{
    {"total_fruits", "Total Fruits"},
    {"whole_fruits", "Whole Fruits"},
    {"total_vegetables", "Total Vegetables"},
    {"greens_and_beans", "Greens and Beans"},
    {"whole_grains", "Whole Grains"},
    {"dairy", "Dairy"},
    {"total_protein_foods", "Total Protein Foods"},
    {"seafood_plant_proteins", "Seafood and Plant Proteins"},
    {"fatty_acids", "Fatty Acids"},
    {"refined_grains", "Refined Grains"},
    {"sodium", "Sodium"},
    {"added_sugars", "Added Sugars"},
    {"saturated_fats", "Saturated Fats"},
}};

// Atwater factors for converting grams to kcal.
constexpr double kKcalPerGramSugar = 4.0;
constexpr double kKcalPerGramFat = 9.0;


ScoreKind parse_kind(const std::string& s) {
  if (s == "adequacy") return ScoreKind::Adequacy;
  if (s == "moderation") return ScoreKind::Moderation;
  if (s == "ratio") return ScoreKind::Ratio;
  throw ConfigError("unknown scoring kind: " + s);
}

DensityBasis parse_basis(const std::string& s) {
  if (s == "per_1000_kcal") return DensityBasis::Per1000Kcal;
  if (s == "percent_energy") return DensityBasis::PercentEnergy;
  if (s == "ratio") return DensityBasis::Ratio;
  throw ConfigError("unknown density basis: " + s);
}

}  // namespace

std::string_view component_id(Component c) { return kInfo[index_of(c)].id; }
std::string_view component_name(Component c) { return kInfo[index_of(c)].name; }

std::optional<Component> parse_component(std::string_view text) {
  for (auto c : kAllComponents) {
    if (text == component_id(c) || text == component_name(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::Adequacy: return "adequacy";
    case ScoreKind::Moderation: return "moderation";
    case ScoreKind::Ratio: return "ratio";
  }
  return "";
}

std::string_view to_string(DensityBasis b) {
  switch (b) {
    case DensityBasis::Per1000Kcal: return "per_1000_kcal";
    case DensityBasis::PercentEnergy: return "percent_energy";
    case DensityBasis::Ratio: return "ratio";
  }
  return "";
}

const StandardsTable& StandardsTable::defaults() {
  static const StandardsTable table = [] {
    StandardsTable t;
    using enum Component;
    auto adequacy = [](Component c, double pts, double at_max) {
      return ScoringStandard{c, ScoreKind::Adequacy, pts, DensityBasis::Per1000Kcal, at_max, 0.0};
    };
    auto moderation = [](Component c, DensityBasis basis, double at_max, double at_min) {
      return ScoringStandard{c, ScoreKind::Moderation, 10, basis, at_max, at_min};
    };
    t.entries_ = {
        adequacy(TotalFruits, 5, 0.8),
        adequacy(WholeFruits, 5, 0.4),
        adequacy(TotalVegetables, 5, 1.1),
        adequacy(GreensAndBeans, 5, 0.2),
        adequacy(WholeGrains, 10, 1.5),
        adequacy(Dairy, 10, 1.3),
        adequacy(TotalProtein, 5, 2.5),
        adequacy(SeafoodPlantProteins, 5, 0.8),
        ScoringStandard{FattyAcids, ScoreKind::Ratio, 10, DensityBasis::Ratio, 2.5, 1.2},
        moderation(RefinedGrains, DensityBasis::Per1000Kcal, 1.8, 4.3),
        moderation(Sodium, DensityBasis::Per1000Kcal, 1.1, 2.0),
        moderation(AddedSugars, DensityBasis::PercentEnergy, 6.5, 26),
        moderation(SaturatedFats, DensityBasis::PercentEnergy, 8, 16),
    };
    t.validate();
    return t;
  }();
  return table;
}

StandardsTable StandardsTable::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("standards document must be a JSON object");
  StandardsTable t = defaults();
  for (const auto& [key, entry] : doc.items()) {
    auto c = parse_component(key);
    if (!c) throw ConfigError("unknown HEI component in standards: " + key);
    if (!entry.is_object()) throw ConfigError("standards entry for " + key + " must be an object");
    auto& s = t.entries_[index_of(*c)];
    try {
      if (entry.contains("kind")) s.kind = parse_kind(entry.at("kind").get<std::string>());
      if (entry.contains("basis")) s.basis = parse_basis(entry.at("basis").get<std::string>());
      if (entry.contains("max_points")) s.max_points = entry.at("max_points").get<double>();
      if (entry.contains("std_for_max")) s.std_for_max = entry.at("std_for_max").get<double>();
      if (entry.contains("std_for_min")) s.std_for_min = entry.at("std_for_min").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("standards entry for " + key + ": " + e.what());
    }
  }
  t.validate();
  return t;
}

StandardsTable StandardsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open standards file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("standards file " + path + ": " + e.what());
  }
  return from_json(doc);
}

void StandardsTable::validate() const {
  for (const auto& s : entries_) {
    const std::string id(component_id(s.component));
    if (s.max_points != 5 && s.max_points != 10) {
      throw ConfigError(id + ": max_points must be 5 or 10");
    }
    if (!std::isfinite(s.std_for_max) || !std::isfinite(s.std_for_min)) {
      throw ConfigError(id + ": cut points must be finite");
    }
    if (s.kind == ScoreKind::Adequacy) {
      if (!(s.std_for_min == 0 && s.std_for_max > 0)) {
        throw ConfigError(id + ": adequacy requires std_for_min = 0 < std_for_max");
      }
    } else if (s.std_for_max == s.std_for_min) {
      throw ConfigError(id + ": std_for_max must differ from std_for_min");
    }
  }
  if (max_total() != 100) throw ConfigError("component max_points must sum to 100");
}

double StandardsTable::max_total() const {
  double sum = 0;
  for (const auto& s : entries_) sum += s.max_points;
  return sum;
}

nlohmann::json StandardsTable::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& s : entries_) {
    doc[std::string(component_id(s.component))] = {
        {"kind", to_string(s.kind)},         {"max_points", s.max_points},
        {"basis", to_string(s.basis)},       {"std_for_max", s.std_for_max},
        {"std_for_min", s.std_for_min},
    };
  }
  return doc;
}

Density density(double quantity, double energy_kcal) {
  if (quantity < 0 || energy_kcal < 0) throw ArgumentError("density: negative input");
  if (energy_kcal == 0) return kZeroEnergy;
  return quantity * 1000.0 / energy_kcal;
}

double score_component(Density value, const ScoringStandard& s) {
  if (!value) return 0.0;
  const double v = *value;
  if (std::isnan(v) || v < 0) throw ArgumentError("score_component: negative or NaN value");
  if (s.kind == ScoreKind::Adequacy) {
    return s.max_points * std::min(1.0, v / s.std_for_max);
  }
  const double t = (s.std_for_min - v) / (s.std_for_min - s.std_for_max);
  return s.max_points * std::clamp(t, 0.0, 1.0);
}

Density component_value(const IntakeProfile& x, Component c) {
  const double e = x.energy_kcal;
  if (e == 0) return kZeroEnergy;
  using enum Component;
  switch (c) {
    case TotalFruits: return density(x.f_totfruit_cup, e);
    case WholeFruits: return density(x.f_wholefruit_cup, e);
    case TotalVegetables: return density(x.f_totveg_cup, e);
    case GreensAndBeans: return density(x.f_greensbeans_cup, e);
    case WholeGrains: return density(x.f_wholegrain_oz, e);
    case Dairy: return density(x.f_dairy_cup, e);
    case TotalProtein: return density(x.f_totprotein_oz, e);
    case SeafoodPlantProteins: return density(x.f_seaplant_oz, e);
    case RefinedGrains: return density(x.f_refinedgrain_oz, e);
    // Sodium cut points are in grams per 1000 kcal.
    case Sodium: return density(x.sodium_mg / 1000.0, e);
    case AddedSugars: return 100.0 * x.added_sugars_g * kKcalPerGramSugar / e;
    case SaturatedFats: return 100.0 * x.sfa_g * kKcalPerGramFat / e;
    case FattyAcids: {
      const double unsat = x.mufa_g + x.pufa_g;
      if (x.sfa_g == 0) return unsat > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      return unsat / x.sfa_g;
    }
  }
  return kZeroEnergy;
}

HeiScore score_hei(const IntakeProfile& x, const StandardsTable& standards) {
  HeiScore out;
  for (auto c : kAllComponents) {
    auto& cs = out.components[index_of(c)];
    cs.value = component_value(x, c);
    cs.points = score_component(cs.value, standards[c]);
    out.total += cs.points;
  }
  return out;
}

HeiScore score_days(std::span<const IntakeProfile> days, const StandardsTable& standards) {
  if (days.empty()) throw ArgumentError("score_days: no valid days");
  if (days.size() == 1) return score_hei(days.front(), standards);
  HeiScore out;
  const double n = static_cast<double>(days.size());
  std::array<double, kComponentCount> value_sum{};
  std::array<bool, kComponentCount> value_known{};
  value_known.fill(true);
  for (const auto& d : days) {
    const auto s = score_hei(d, standards);
    for (std::size_t k = 0; k < kComponentCount; ++k) {
      out.components[k].points += s.components[k].points;
      if (s.components[k].value) {
        value_sum[k] += *s.components[k].value;
      } else {
        value_known[k] = false;
      }
    }
  }
  for (std::size_t k = 0; k < kComponentCount; ++k) {
    out.components[k].points /= n;
    if (value_known[k]) out.components[k].value = value_sum[k] / n;
    out.total += out.components[k].points;
  }
  return out;
}

HeiScore score_user(const UserRecord& u, const StandardsTable& standards) {
  if (!u.days.empty()) return score_days(u.days, standards);
  return score_hei(u.intake, standards);
}

std::array<double, kComponentCount> component_deltas(const HeiScore& before, const HeiScore& after) {
  std::array<double, kComponentCount> d{};
  for (std::size_t k = 0; k < kComponentCount; ++k) {
    d[k] = after.components[k].points - before.components[k].points;
  }
  return d;
}

}  // namespace heirag
