#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace heirag {

using Seqn = std::int64_t;
using FoodCode = std::int64_t;

/// Quantities of energy, nutrients and food-pattern equivalents.
///
/// Used for a person's daily intake (the baseline intake vector of the
/// recommender) and for a food's per-serving amounts, so that applying a food
/// to an intake is plain vector arithmetic.
struct IntakeProfile {
  double energy_kcal = 0;
  double protein_g = 0;
  double carb_g = 0;
  double fat_g = 0;
  double fiber_g = 0;
  double sodium_mg = 0;
  double potassium_mg = 0;
  double sfa_g = 0;
  double mufa_g = 0;
  double pufa_g = 0;
  double added_sugars_g = 0;
  double f_totfruit_cup = 0;
  double f_wholefruit_cup = 0;
  double f_totveg_cup = 0;
  double f_greensbeans_cup = 0;
  double f_wholegrain_oz = 0;
  double f_dairy_cup = 0;
  double f_totprotein_oz = 0;
  double f_seaplant_oz = 0;
  double f_refinedgrain_oz = 0;

  bool operator==(const IntakeProfile&) const = default;
};

struct IntakeField {
  std::string_view name;
  double IntakeProfile::*member;
};

/// Every quantitative field, in the column order of the persons table.
inline constexpr std::array<IntakeField, 20> kIntakeFields{{
    {"energy_kcal", &IntakeProfile::energy_kcal},
    {"protein_g", &IntakeProfile::protein_g},
    {"carb_g", &IntakeProfile::carb_g},
    {"fat_g", &IntakeProfile::fat_g},
    {"fiber_g", &IntakeProfile::fiber_g},
    {"sodium_mg", &IntakeProfile::sodium_mg},
    {"potassium_mg", &IntakeProfile::potassium_mg},
    {"sfa_g", &IntakeProfile::sfa_g},
    {"mufa_g", &IntakeProfile::mufa_g},
    {"pufa_g", &IntakeProfile::pufa_g},
    {"added_sugars_g", &IntakeProfile::added_sugars_g},
    {"f_totfruit_cup", &IntakeProfile::f_totfruit_cup},
    {"f_wholefruit_cup", &IntakeProfile::f_wholefruit_cup},
    {"f_totveg_cup", &IntakeProfile::f_totveg_cup},
    {"f_greensbeans_cup", &IntakeProfile::f_greensbeans_cup},
    {"f_wholegrain_oz", &IntakeProfile::f_wholegrain_oz},
    {"f_dairy_cup", &IntakeProfile::f_dairy_cup},
    {"f_totprotein_oz", &IntakeProfile::f_totprotein_oz},
    {"f_seaplant_oz", &IntakeProfile::f_seaplant_oz},
    {"f_refinedgrain_oz", &IntakeProfile::f_refinedgrain_oz},
}};

/// Grams of added sugars per teaspoon-equivalent.
inline constexpr double kGramsPerTspSugar = 4.2;

/// Throws ArgumentError unless every field is finite and non-negative and the
/// subgroup <= group relations hold (whole fruit, greens and beans, seafood
/// and plant proteins).
void validate_intake(const IntakeProfile& x);

/// Returns a description of the first invariant violation, or empty.
std::string intake_violation(const IntakeProfile& x);

/// Lowers each subgroup to its parent group where it exceeds it.
IntakeProfile clamp_hierarchy(IntakeProfile x);

/// Field-wise arithmetic mean. Throws ArgumentError on an empty span.
IntakeProfile mean_profile(std::span<const IntakeProfile> days);

/// One food-pattern-mapped food with per-serving amounts.
///
/// Fields the foods table does not carry (protein, carbohydrate, total fat,
/// potassium) stay zero unless the optional columns are present.
struct FoodItem {
  FoodCode food_code = 0;
  std::string description;
  std::string serving_desc;
  std::vector<std::string> tags;  // sorted, unique
  IntakeProfile amounts;

  bool operator==(const FoodItem&) const = default;
};

/// Splits a semicolon-separated tag list, trims blanks, sorts and dedups.
std::vector<std::string> split_tags(std::string_view text);
std::string join_tags(std::span<const std::string> tags);

}  // namespace heirag
