#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "heirag/error.hpp"
#include "heirag/ingest.hpp"
#include "heirag/rng.hpp"

namespace heirag {

namespace {

// Per-serving reference amounts for common foods, loosely following
// food-pattern equivalents for the stated serving.
struct FoodSeed {
  const char* description;
  const char* serving;
  const char* tags;
  double energy, sodium, sugar, sfa, mufa, pufa, fiber;
  double fruit, whole_fruit, veg, greens_beans, whole_grain, dairy, protein, sea_plant, refined;
};

constexpr std::array<FoodSeed, 50> kFoodSeeds{{
    {"apple, raw", "1 medium", "fruit", 95, 2, 0, 0.03, 0.01, 0.05, 4.4, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0},
    {"banana, raw", "1 medium", "fruit", 105, 1, 0, 0.1, 0.03, 0.08, 3.1, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0},
    {"orange juice, 100%", "1 cup", "fruit;juice", 110, 2, 0, 0.05, 0.05, 0.05, 0.5, 1.0, 0, 0, 0, 0, 0, 0, 0, 0},
    {"strawberries, raw", "1 cup", "fruit", 50, 2, 0, 0.02, 0.05, 0.2, 3.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0},
    {"mixed berries, frozen", "1 cup", "fruit", 70, 1, 0, 0.02, 0.05, 0.2, 4.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0},
    {"raisins", "1/4 cup", "fruit;dried", 120, 5, 0, 0.02, 0.02, 0.04, 1.5, 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0},
    {"spinach, cooked", "1 cup", "vegetable;leafy", 41, 126, 0, 0.1, 0.02, 0.2, 4.3, 0, 0, 2.0, 2.0, 0, 0, 0, 0, 0},
    {"broccoli, steamed", "1 cup", "vegetable", 55, 64, 0, 0.1, 0.03, 0.2, 5.1, 0, 0, 1.0, 1.0, 0, 0, 0, 0, 0},
    {"carrots, raw", "1 cup", "vegetable", 52, 88, 0, 0.04, 0.02, 0.1, 3.6, 0, 0, 1.0, 0, 0, 0, 0, 0, 0},
    {"sweet potato, baked", "1 medium", "vegetable", 105, 41, 0, 0.02, 0.01, 0.1, 3.8, 0, 0, 1.0, 0, 0, 0, 0, 0, 0},
    {"garden salad, no dressing", "1.5 cups", "vegetable;leafy", 20, 20, 0, 0.02, 0.01, 0.1, 2.0, 0, 0, 1.0, 0.7, 0, 0, 0, 0, 0},
    {"black beans, cooked", "1/2 cup", "legume;vegetable", 114, 1, 0, 0.1, 0.02, 0.2, 7.5, 0, 0, 0.5, 0.5, 0, 0, 1.0, 1.0, 0},
    {"lentil soup, low sodium", "1 cup", "legume;soup", 160, 140, 0, 0.3, 0.5, 0.4, 8.0, 0, 0, 0.5, 0.5, 0, 0, 1.5, 1.5, 0},
    {"kale salad with chickpeas", "1.5 cups", "vegetable;legume;leafy", 180, 200, 0, 0.8, 3.0, 2.0, 6.0, 0, 0, 1.0, 1.0, 0, 0, 1.0, 1.0, 0},
    {"hummus", "1/4 cup", "legume;dip", 100, 240, 0, 0.8, 3.0, 2.5, 3.5, 0, 0, 0.25, 0.25, 0, 0, 0.5, 0.5, 0},
    {"oatmeal, cooked", "1 cup", "grain;gluten", 150, 0, 0, 0.5, 0.9, 1.0, 4.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0},
    {"brown rice, cooked", "1 cup", "grain", 216, 10, 0, 0.4, 0.6, 0.6, 3.5, 0, 0, 0, 0, 2.0, 0, 0, 0, 0},
    {"whole wheat bread", "1 slice", "grain;gluten", 80, 140, 1.5, 0.2, 0.2, 0.5, 2.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0},
    {"quinoa, cooked", "1 cup", "grain", 222, 13, 0, 0.4, 1.0, 2.0, 5.0, 0, 0, 0, 0, 2.0, 0, 0, 0, 0},
    {"whole wheat pasta, cooked", "1 cup", "grain;gluten", 175, 5, 0, 0.3, 0.2, 0.4, 6.0, 0, 0, 0, 0, 2.0, 0, 0, 0, 0},
    {"whole grain cereal", "1 cup", "grain;gluten;breakfast", 110, 160, 4, 0.2, 0.3, 0.4, 3.0, 0, 0, 0, 0, 1.3, 0, 0, 0, 0.2},
    {"granola bar", "1 bar", "grain;snack;nuts", 190, 100, 12, 2.5, 1.5, 1.0, 2.0, 0, 0, 0, 0, 0.7, 0, 0.3, 0.3, 0.1},
    {"white bread", "1 slice", "grain;gluten", 75, 140, 1.5, 0.2, 0.2, 0.4, 0.8, 0, 0, 0, 0, 0, 0, 0, 0, 1.0},
    {"white rice, cooked", "1 cup", "grain", 205, 2, 0, 0.1, 0.1, 0.1, 0.6, 0, 0, 0, 0, 0, 0, 0, 0, 2.0},
    {"pasta, enriched, cooked", "1 cup", "grain;gluten", 220, 1, 0, 0.3, 0.2, 0.5, 2.5, 0, 0, 0, 0, 0, 0, 0, 0, 2.0},
    {"pretzels", "1 oz", "snack;grain;gluten", 110, 450, 0.5, 0.1, 0.1, 0.2, 1.0, 0, 0, 0, 0, 0, 0, 0, 0, 1.0},
    {"low-fat milk", "1 cup", "dairy", 102, 107, 0, 1.5, 0.7, 0.1, 0, 0, 0, 0, 0, 0, 1.0, 0, 0, 0},
    {"plain yogurt, nonfat", "1 cup", "dairy", 137, 189, 0, 0.3, 0.1, 0.02, 0, 0, 0, 0, 0, 0, 1.0, 0, 0, 0},
    {"cheddar cheese", "1.5 oz", "dairy", 171, 264, 0, 8.0, 3.5, 0.5, 0, 0, 0, 0, 0, 0, 1.0, 0, 0, 0},
    {"fruit yogurt, sweetened", "6 oz", "dairy;sweet", 170, 100, 19, 1.5, 0.6, 0.1, 0, 0.1, 0, 0, 0, 0, 0.75, 0, 0, 0},
    {"fortified soy milk", "1 cup", "soy", 100, 90, 6, 0.5, 1.0, 2.0, 1.0, 0, 0, 0, 0, 0, 1.0, 0, 0, 0},
    {"salmon, baked", "3 oz", "seafood;fish", 175, 50, 0, 1.1, 2.0, 2.2, 0, 0, 0, 0, 0, 0, 0, 3.0, 3.0, 0},
    {"tuna, canned in water", "3 oz", "seafood;fish", 100, 290, 0, 0.2, 0.1, 0.3, 0, 0, 0, 0, 0, 0, 0, 3.0, 3.0, 0},
    {"sardines, canned in oil", "3 oz", "seafood;fish", 180, 260, 0, 1.3, 3.3, 4.3, 0, 0, 0, 0, 0, 0, 0, 3.0, 3.0, 0},
    {"almonds", "1 oz", "nuts;snack", 164, 0, 0, 1.1, 8.8, 3.5, 3.5, 0, 0, 0, 0, 0, 0, 2.0, 2.0, 0},
    {"peanut butter", "2 tbsp", "nuts;spread", 190, 140, 3, 3.3, 8.0, 4.4, 1.6, 0, 0, 0, 0, 0, 0, 2.0, 2.0, 0},
    {"tofu, firm", "1/2 cup", "soy;legume", 180, 18, 0, 1.6, 2.4, 6.2, 2.9, 0, 0, 0, 0, 0, 0, 2.5, 2.5, 0},
    {"chicken breast, grilled", "3 oz", "meat;poultry", 140, 60, 0, 0.9, 1.2, 0.7, 0, 0, 0, 0, 0, 0, 0, 3.0, 0, 0},
    {"eggs, scrambled", "2 large", "egg", 180, 320, 0, 3.4, 4.1, 2.0, 0, 0, 0, 0, 0, 0, 0.1, 2.0, 0, 0},
    {"ground beef patty", "3 oz", "meat;beef", 230, 65, 0, 6.0, 6.7, 0.4, 0, 0, 0, 0, 0, 0, 0, 3.0, 0, 0},
    {"bacon", "3 slices", "meat;pork", 130, 550, 0, 3.3, 4.5, 1.1, 0, 0, 0, 0, 0, 0, 0, 1.0, 0, 0},
    {"fried chicken", "3 oz", "meat;poultry;fried", 250, 550, 0, 3.5, 6.0, 3.0, 0.5, 0, 0, 0, 0, 0, 0, 2.5, 0, 0.4},
    {"potato chips", "1 oz", "snack;fried", 150, 170, 0, 1.0, 2.8, 5.5, 1.2, 0, 0, 0.2, 0, 0, 0, 0, 0, 0},
    {"cola soda", "12 fl oz", "beverage;sweet", 140, 45, 37, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {"chocolate chip cookies", "2 cookies", "sweet;snack;gluten", 160, 110, 11, 3.0, 2.5, 1.0, 0.7, 0, 0, 0, 0, 0, 0, 0, 0, 0.6},
    {"vanilla ice cream", "1/2 cup", "dairy;sweet", 140, 50, 14, 4.5, 2.0, 0.3, 0.5, 0, 0, 0, 0, 0, 0.4, 0, 0, 0},
    {"cheese pizza", "1 slice", "mixed dish;dairy;gluten", 285, 640, 3.8, 4.8, 3.0, 1.9, 2.5, 0, 0, 0.2, 0, 0, 0.6, 0, 0, 1.8},
    {"hamburger on bun", "1 sandwich", "mixed dish;meat;beef;gluten", 350, 500, 5, 5.0, 5.0, 1.0, 1.5, 0, 0, 0.2, 0, 0, 0, 2.5, 0, 1.5},
    {"vegetable stir-fry with tofu", "1 cup", "mixed dish;soy;vegetable", 200, 450, 2, 1.2, 2.5, 4.0, 4.0, 0, 0, 1.2, 0.4, 0, 0, 1.5, 1.5, 0},
    {"canned tomato soup", "1 cup", "soup;vegetable", 90, 700, 10, 0.3, 0.3, 0.5, 1.5, 0, 0, 1.0, 0, 0, 0, 0, 0, 0},
}};

constexpr std::array<const char*, 6> kVariantStyles{"home style", "store brand", "restaurant",
                                                     "reduced sodium", "family size", "organic"};

FoodItem food_from_seed(const FoodSeed& s) {
  FoodItem f;
  f.description = s.description;
  f.serving_desc = s.serving;
  f.tags = split_tags(s.tags);
  auto& a = f.amounts;
  a.energy_kcal = s.energy;
  a.sodium_mg = s.sodium;
  a.added_sugars_g = s.sugar;
  a.sfa_g = s.sfa;
  a.mufa_g = s.mufa;
  a.pufa_g = s.pufa;
  a.fiber_g = s.fiber;
  a.f_totfruit_cup = s.fruit;
  a.f_wholefruit_cup = s.whole_fruit;
  a.f_totveg_cup = s.veg;
  a.f_greensbeans_cup = s.greens_beans;
  a.f_wholegrain_oz = s.whole_grain;
  a.f_dairy_cup = s.dairy;
  a.f_totprotein_oz = s.protein;
  a.f_seaplant_oz = s.sea_plant;
  a.f_refinedgrain_oz = s.refined;
  a.fat_g = 1.1 * (s.sfa + s.mufa + s.pufa);
  a.protein_g = 7.0 * s.protein + 8.0 * s.dairy + 3.0 * (s.whole_grain + s.refined);
  a.carb_g = std::max(0.0, (s.energy - 4.0 * a.protein_g - 9.0 * a.fat_g) / 4.0);
  a.potassium_mg = 150.0 * (s.fruit + s.veg) + 350.0 * s.dairy + 40.0 * s.protein;
  return f;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

std::vector<FoodItem> gen_synthetic_foods(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw ArgumentError("gen_synthetic_foods: n must be >= 1");
  Rng rng(seed);
  std::vector<FoodItem> foods;
  foods.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& base = kFoodSeeds[i % kFoodSeeds.size()];
    const std::size_t round = i / kFoodSeeds.size();
    FoodItem f = food_from_seed(base);
    f.food_code = 11000000 + static_cast<FoodCode>(i);
    if (round > 0) {
      const char* style = kVariantStyles[rng.below(kVariantStyles.size())];
      f.description = std::string(base.description) + ", " + style + " " + std::to_string(round);
      // One portion factor for everything keeps subgroup relations intact;
      // sodium and sugar get their own recipe factor.
      const double portion = rng.uniform(0.75, 1.3);
      const double salt = std::string_view(style) == "reduced sodium" ? 0.5 : rng.lognormal(0.0, 0.25);
      const double sweet = rng.lognormal(0.0, 0.25);
      for (const auto& field : kIntakeFields) f.amounts.*field.member *= portion;
      f.amounts.sodium_mg *= salt;
      f.amounts.added_sugars_g *= sweet;
    }
    for (const auto& field : kIntakeFields) {
      auto& v = f.amounts.*field.member;
      v = field.name.starts_with("f_") ? round_to(v, 0.01) : round_to(v, 0.1);
    }
    f.amounts = clamp_hierarchy(f.amounts);
    foods.push_back(std::move(f));
  }
  return foods;
}

namespace {

constexpr std::array<const char*, 7> kExclusionTags{"dairy", "seafood", "gluten", "nuts",
                                                    "pork",  "meat",    "soy"};

// Person-level mean intake per 1000 kcal (or %energy / ratio) driven by a
// latent quality score q ~ N(0, 1).
struct Densities {
  double fruit, whole_fruit_frac, veg, greens_frac, whole_grain, dairy, protein, sea_frac;
  double refined, sodium_g, sugar_pct, sfa_pct, fa_ratio;
};

Densities draw_densities(Rng& rng, double q) {
  auto adequacy = [&](double base, double std_max) {
    return std_max * base * std::exp(0.34 * q + 0.45 * rng.normal());
  };
  auto frac = [&](double lo, double hi) {
    const double t = 1.0 / (1.0 + std::exp(-(0.55 * q + 0.6 * rng.normal())));
    return lo + (hi - lo) * t;
  };
  Densities d{};
  d.fruit = adequacy(0.4, 0.8);
  d.whole_fruit_frac = frac(0.3, 0.95);
  d.veg = adequacy(0.6, 1.1);
  d.greens_frac = frac(0.03, 0.4);
  d.whole_grain = adequacy(0.22, 1.5);
  d.dairy = adequacy(0.5, 1.3);
  d.protein = adequacy(1.0, 2.5);
  d.sea_frac = frac(0.08, 0.5);
  d.refined = 3.6 * std::exp(-0.16 * q + 0.25 * rng.normal());
  d.sodium_g = 1.8 * std::exp(-0.07 * q + 0.15 * rng.normal());
  d.sugar_pct = 14.5 * std::exp(-0.25 * q + 0.4 * rng.normal());
  d.sfa_pct = 11.8 * std::exp(-0.09 * q + 0.15 * rng.normal());
  d.fa_ratio = 1.9 * std::exp(0.1 * q + 0.2 * rng.normal());
  return d;
}

IntakeProfile draw_day(Rng& rng, const Densities& d, double mean_energy) {
  // Day-to-day variation: energy and each food group wander independently.
  auto wobble = [&] { return std::exp(0.22 * rng.normal()); };
  const double e = mean_energy * wobble();
  const double k = e / 1000.0;
  IntakeProfile x;
  x.energy_kcal = e;
  x.f_totfruit_cup = d.fruit * k * wobble();
  x.f_wholefruit_cup = x.f_totfruit_cup * d.whole_fruit_frac;
  x.f_totveg_cup = d.veg * k * wobble();
  x.f_greensbeans_cup = x.f_totveg_cup * d.greens_frac;
  x.f_wholegrain_oz = d.whole_grain * k * wobble();
  x.f_dairy_cup = d.dairy * k * wobble();
  x.f_totprotein_oz = d.protein * k * wobble();
  x.f_seaplant_oz = x.f_totprotein_oz * d.sea_frac;
  x.f_refinedgrain_oz = d.refined * k * wobble();
  x.sodium_mg = d.sodium_g * 1000.0 * k * wobble();
  x.added_sugars_g = d.sugar_pct / 100.0 * e / 4.0 * wobble();
  x.sfa_g = d.sfa_pct / 100.0 * e / 9.0 * wobble();
  const double unsat = x.sfa_g * d.fa_ratio * wobble();
  x.mufa_g = 0.6 * unsat;
  x.pufa_g = 0.4 * unsat;
  x.fat_g = 1.08 * (x.sfa_g + x.mufa_g + x.pufa_g);
  x.protein_g = 0.16 * e / 4.0 * wobble();
  x.carb_g = std::max(0.0, (e - 4.0 * x.protein_g - 9.0 * x.fat_g) / 4.0);
  x.fiber_g = 8.0 * k * std::exp(0.25 * (d.fruit + d.veg + d.whole_grain) - 0.5) * wobble();
  x.potassium_mg = 1300.0 * k * wobble();
  return x;
}

}  // namespace

std::vector<UserRecord> gen_synthetic_population(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw ArgumentError("gen_synthetic_population: n must be >= 1");
  Rng rng(seed);
  std::vector<UserRecord> users;
  users.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    UserRecord u;
    u.seqn = 100001 + static_cast<Seqn>(i);
    auto& demo = u.demo;
    demo.age_years = std::floor(rng.uniform(18.0, 81.0));
    demo.sex = rng.bernoulli(0.5) ? Sex::Male : Sex::Female;
    demo.race_eth = std::to_string(1 + rng.below(6));
    demo.education = std::to_string(1 + rng.below(5));
    demo.income_ratio = std::round(rng.uniform(0.0, 5.0) * 100.0) / 100.0;
    demo.bmi = std::round(std::clamp(rng.normal(28.5, 6.0), 15.0, 60.0) * 10.0) / 10.0;
    demo.flag_diabetes = rng.bernoulli(0.12);
    demo.flag_cvd = rng.bernoulli(0.08);
    for (const char* tag : kExclusionTags) {
      if (rng.bernoulli(0.04)) demo.exclusions.emplace_back(tag);
    }
    std::sort(demo.exclusions.begin(), demo.exclusions.end());

    const double energy = 2000.0 * std::exp(0.28 * rng.normal() + (*demo.sex == Sex::Male ? 0.1 : -0.1));
    const double quality = rng.normal();
    const auto dens = draw_densities(rng, quality);
    u.days.push_back(draw_day(rng, dens, energy));
    u.days.push_back(draw_day(rng, dens, energy));
    u.intake = mean_profile(u.days);
    users.push_back(std::move(u));
  }
  return users;
}

}  // namespace heirag
