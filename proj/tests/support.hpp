#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "heirag/ingest.hpp"
#include "heirag/nutrients.hpp"
#include "heirag/rng.hpp"

namespace testing {

using namespace heirag;

// Independent HEI-2020 oracle: literal cut points, no shared code with the
// engine beyond the IntakeProfile layout.
struct OracleScore {
  double total = 0;
  double parts[13] = {};
};

inline double oracle_adequacy(double max, double v, double std_max) { return max * std::min(1.0, v / std_max); }

inline double oracle_moderation(double max, double v, double best, double worst) {
  if (v <= best) return max;
  if (v >= worst) return 0;
  return max * (worst - v) / (worst - best);
}

inline OracleScore oracle_hei(const IntakeProfile& x) {
  OracleScore s;
  if (x.energy_kcal <= 0) return s;
  const double k = x.energy_kcal / 1000.0;
  s.parts[0] = oracle_adequacy(5, x.f_totfruit_cup / k, 0.8);
  s.parts[1] = oracle_adequacy(5, x.f_wholefruit_cup / k, 0.4);
  s.parts[2] = oracle_adequacy(5, x.f_totveg_cup / k, 1.1);
  s.parts[3] = oracle_adequacy(5, x.f_greensbeans_cup / k, 0.2);
  s.parts[4] = oracle_adequacy(10, x.f_wholegrain_oz / k, 1.5);
  s.parts[5] = oracle_adequacy(10, x.f_dairy_cup / k, 1.3);
  s.parts[6] = oracle_adequacy(5, x.f_totprotein_oz / k, 2.5);
  s.parts[7] = oracle_adequacy(5, x.f_seaplant_oz / k, 0.8);
  const double unsat = x.mufa_g + x.pufa_g;
  double fa = 0;
  if (x.sfa_g > 0) {
    const double r = unsat / x.sfa_g;
    fa = r >= 2.5 ? 10 : r <= 1.2 ? 0 : 10 * (r - 1.2) / (2.5 - 1.2);
  } else if (unsat > 0) {
    fa = 10;
  }
  s.parts[8] = fa;
  s.parts[9] = oracle_moderation(10, x.f_refinedgrain_oz / k, 1.8, 4.3);
  s.parts[10] = oracle_moderation(10, x.sodium_mg / 1000.0 / k, 1.1, 2.0);
  s.parts[11] = oracle_moderation(10, 100.0 * x.added_sugars_g * 4.0 / x.energy_kcal, 6.5, 26);
  s.parts[12] = oracle_moderation(10, 100.0 * x.sfa_g * 9.0 / x.energy_kcal, 8, 16);
  for (double p : s.parts) s.total += p;
  return s;
}

/// A valid random intake: energy 500-4500 kcal, each quantity sometimes zero,
/// subgroups never above their groups.
inline IntakeProfile random_profile(Rng& rng) {
  auto q = [&](double hi) { return rng.bernoulli(0.1) ? 0.0 : rng.uniform(0.0, hi); };
  IntakeProfile x;
  x.energy_kcal = rng.uniform(500, 4500);
  x.protein_g = q(150);
  x.carb_g = q(400);
  x.fat_g = q(150);
  x.fiber_g = q(40);
  x.sodium_mg = q(6000);
  x.potassium_mg = q(5000);
  x.sfa_g = q(50);
  x.mufa_g = q(50);
  x.pufa_g = q(40);
  x.added_sugars_g = q(150);
  x.f_totfruit_cup = q(4);
  x.f_wholefruit_cup = x.f_totfruit_cup * rng.uniform();
  x.f_totveg_cup = q(5);
  x.f_greensbeans_cup = x.f_totveg_cup * rng.uniform();
  x.f_wholegrain_oz = q(6);
  x.f_dairy_cup = q(4);
  x.f_totprotein_oz = q(12);
  x.f_seaplant_oz = x.f_totprotein_oz * rng.uniform();
  x.f_refinedgrain_oz = q(10);
  return x;
}

inline UserRecord make_user(Seqn seqn, const IntakeProfile& x) {
  UserRecord u;
  u.seqn = seqn;
  u.demo.age_years = 45;
  u.demo.sex = Sex::Female;
  u.demo.race_eth = "3";
  u.demo.education = "4";
  u.demo.income_ratio = 2.1;
  u.demo.bmi = 26.4;
  u.demo.flag_diabetes = false;
  u.demo.flag_cvd = false;
  u.intake = x;
  u.days = {x};
  return u;
}

inline FoodItem make_food(FoodCode code, std::string description, IntakeProfile amounts,
                          std::vector<std::string> tags = {}) {
  FoodItem f;
  f.food_code = code;
  f.description = std::move(description);
  f.serving_desc = "1 serving";
  f.tags = std::move(tags);
  std::sort(f.tags.begin(), f.tags.end());
  f.amounts = amounts;
  return f;
}

inline IntakeProfile energy_only(double kcal) {
  IntakeProfile x;
  x.energy_kcal = kcal;
  return x;
}

/// Small hand-made corpus used across suites. Code 50006 has no nutrients
/// at all (the zero-effect food).
inline std::vector<FoodItem> fixture_foods() {
  std::vector<FoodItem> out;
  IntakeProfile a;

  a = energy_only(150);
  a.f_wholegrain_oz = 1.0;
  a.fiber_g = 4;
  out.push_back(make_food(50000, "oatmeal, cooked", a, {"grain"}));

  a = energy_only(160);
  a.f_refinedgrain_oz = 2.0;
  a.sodium_mg = 300;
  out.push_back(make_food(50001, "white bread", a, {"gluten", "grain"}));

  a = energy_only(95);
  a.f_totfruit_cup = 1.0;
  a.f_wholefruit_cup = 1.0;
  a.fiber_g = 4.4;
  out.push_back(make_food(50002, "apple, raw", a, {"fruit"}));

  a = energy_only(40);
  a.f_totveg_cup = 1.0;
  a.f_greensbeans_cup = 1.0;
  a.sodium_mg = 120;
  out.push_back(make_food(50003, "spinach, cooked", a, {"vegetable"}));

  a = energy_only(200);
  a.f_totprotein_oz = 3.0;
  a.f_seaplant_oz = 3.0;
  a.sfa_g = 1.5;
  a.mufa_g = 3.0;
  a.pufa_g = 3.5;
  a.sodium_mg = 60;
  out.push_back(make_food(50004, "salmon, baked", a, {"seafood"}));

  a = energy_only(100);
  a.f_dairy_cup = 1.0;
  a.sfa_g = 1.5;
  a.mufa_g = 0.7;
  a.pufa_g = 0.1;
  a.sodium_mg = 105;
  out.push_back(make_food(50005, "milk, 1% \"low fat\"", a, {"dairy"}));

  out.push_back(make_food(50006, "water, tap", IntakeProfile{}, {"beverage"}));

  a = energy_only(150);
  a.added_sugars_g = 39;
  out.push_back(make_food(50007, "cola soft drink", a, {"beverage"}));

  a = energy_only(160);
  a.sodium_mg = 700;
  a.sfa_g = 1.0;
  a.mufa_g = 2.8;
  a.pufa_g = 5.5;
  out.push_back(make_food(50008, "potato chips, salted", a, {"snack"}));

  a = energy_only(215);
  a.f_wholegrain_oz = 2.0;
  a.fiber_g = 3.5;
  out.push_back(make_food(50009, "brown rice, cooked", a, {"grain"}));

  a = energy_only(230);
  a.f_totprotein_oz = 4.0;
  a.f_seaplant_oz = 4.0;
  a.f_totveg_cup = 0.5;
  a.f_greensbeans_cup = 0.5;
  a.fiber_g = 15.6;
  out.push_back(make_food(50010, "lentils, boiled", a, {"legume"}));

  a = energy_only(150);
  a.f_dairy_cup = 1.0;
  a.added_sugars_g = 12;
  a.sfa_g = 2.5;
  out.push_back(make_food(50011, "yogurt, fruit flavored", a, {"dairy"}));
  return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("heirag_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
