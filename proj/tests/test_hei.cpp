#include <doctest.h>

#include <nlohmann/json.hpp>

#include "heirag/error.hpp"
#include "heirag/hei.hpp"
#include "support.hpp"

using namespace heirag;

namespace {

const StandardsTable& S() { return StandardsTable::defaults(); }

/// Meets every adequacy standard exactly and every moderation standard at
/// its best end, at 2000 kcal.
IntakeProfile saturating_profile() {
  IntakeProfile x;
  x.energy_kcal = 2000;
  x.f_totfruit_cup = 1.6;
  x.f_wholefruit_cup = 0.8;
  x.f_totveg_cup = 2.2;
  x.f_greensbeans_cup = 0.4;
  x.f_wholegrain_oz = 3.0;
  x.f_dairy_cup = 2.6;
  x.f_totprotein_oz = 5.0;
  x.f_seaplant_oz = 1.6;
  x.f_refinedgrain_oz = 3.6;             // 1.8 per 1000 kcal
  x.sodium_mg = 2200;                    // 1.1 g per 1000 kcal
  x.added_sugars_g = 0.065 * 2000 / 4;   // 6.5 % energy
  x.sfa_g = 0.08 * 2000 / 9;             // 8 % energy
  x.mufa_g = 2.5 * x.sfa_g * 0.5;        // ratio 2.5
  x.pufa_g = 2.5 * x.sfa_g * 0.5;
  return x;
}

}  // namespace

TEST_SUITE("hei") {
  TEST_CASE("density examples") {
    CHECK(*density(1.6, 2000) == doctest::Approx(0.8));
    CHECK(*density(0, 2000) == 0);
    CHECK_FALSE(density(1.0, 0).has_value());
    CHECK_THROWS_AS(density(-1, 2000), ArgumentError);
    CHECK_THROWS_AS(density(1, -2000), ArgumentError);
  }

  TEST_CASE("score_component examples") {
    CHECK(score_component(0.8, S()[Component::TotalFruits]) == doctest::Approx(5.0));
    CHECK(score_component(0.4, S()[Component::TotalFruits]) == doctest::Approx(2.5));
    CHECK(score_component(1.55, S()[Component::Sodium]) == doctest::Approx(5.0));
    CHECK(score_component(1.85, S()[Component::FattyAcids]) == doctest::Approx(5.0));
    CHECK(score_component(kZeroEnergy, S()[Component::Sodium]) == 0);
    CHECK(score_component(99.0, S()[Component::Dairy]) == 10);
    CHECK(score_component(std::numeric_limits<double>::infinity(), S()[Component::FattyAcids]) == 10);
    CHECK_THROWS_AS(score_component(-0.1, S()[Component::Dairy]), ArgumentError);
  }

  TEST_CASE("energy only profile scores 40") {
    const auto h = score_hei(testing::energy_only(2000));
    CHECK(h.total == doctest::Approx(40).epsilon(1e-12));
    for (Component c : {Component::RefinedGrains, Component::Sodium, Component::AddedSugars,
                        Component::SaturatedFats}) {
      CHECK(h.points(c) == 10);
    }
    CHECK(h.points(Component::FattyAcids) == 0);
    CHECK(h.points(Component::WholeGrains) == 0);
  }

  TEST_CASE("zero energy scores 0 everywhere") {
    IntakeProfile x;
    x.sodium_mg = 5000;
    x.f_totfruit_cup = 2;
    const auto h = score_hei(x);
    CHECK(h.total == 0);
    for (auto& c : h.components) {
      CHECK(c.points == 0);
      CHECK_FALSE(c.value.has_value());
    }
  }

  TEST_CASE("saturating profile scores 100") {
    const auto h = score_hei(saturating_profile());
    CHECK(std::abs(h.total - 100) < 1e-6);
  }

  TEST_CASE("fatty acid rule when saturated fat is zero") {
    auto x = testing::energy_only(2000);
    x.mufa_g = 10;
    CHECK(score_hei(x).points(Component::FattyAcids) == 10);
    x.mufa_g = 0;
    CHECK(score_hei(x).points(Component::FattyAcids) == 0);
  }

  TEST_CASE("score_user averages day scores") {
    // Two days chosen so their totals are 40 and 60.
    auto d1 = testing::energy_only(2000);
    auto d2 = testing::energy_only(2000);
    d2.f_wholegrain_oz = 3.0;  // +10 whole grains
    d2.f_dairy_cup = 2.6;      // +10 dairy
    REQUIRE(score_hei(d1).total == doctest::Approx(40));
    REQUIRE(score_hei(d2).total == doctest::Approx(60));
    UserRecord u;
    u.days = {d1, d2};
    u.intake = mean_profile(u.days);
    CHECK(score_user(u).total == doctest::Approx(50));

    UserRecord one;
    one.days = {d2};
    one.intake = d2;
    CHECK(score_user(one).total == doctest::Approx(score_hei(d2).total));

    UserRecord twin;
    twin.days = {d2, d2};
    twin.intake = d2;
    CHECK(score_user(twin).total == doctest::Approx(score_hei(d2).total));

    CHECK_THROWS_AS(score_days(std::span<const IntakeProfile>{}), ArgumentError);
  }

  TEST_CASE("standards table defaults and overrides") {
    CHECK(S().max_total() == 100);
    CHECK(S()[Component::WholeGrains].std_for_max == 1.5);
    CHECK(S()[Component::AddedSugars].std_for_min == 26);
    auto t = StandardsTable::from_json(nlohmann::json::parse(R"({"sodium": {"std_for_max": 1.2}})"));
    CHECK(t[Component::Sodium].std_for_max == 1.2);
    CHECK(t[Component::Sodium].std_for_min == 2.0);
    CHECK_THROWS_AS(StandardsTable::from_json(nlohmann::json::parse(R"({"bogus": {}})")), ConfigError);
    CHECK_THROWS_AS(StandardsTable::from_json(nlohmann::json::parse(R"({"dairy": {"max_points": 5}})")),
                    ConfigError);
    auto rt = StandardsTable::from_json(S().to_json());
    for (Component c : kAllComponents) CHECK(rt[c].std_for_max == S()[c].std_for_max);
  }

  TEST_CASE("component names and ids parse") {
    for (Component c : kAllComponents) {
      CHECK(parse_component(component_id(c)) == c);
      CHECK(parse_component(component_name(c)) == c);
    }
    CHECK(component_name(Component::WholeGrains) == "Whole Grains");
    CHECK_FALSE(parse_component("Vitamin C"));
  }

  TEST_CASE("property: engine agrees with the independent oracle") {
    Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
      const auto x = testing::random_profile(rng);
      const auto h = score_hei(x);
      const auto o = testing::oracle_hei(x);
      REQUIRE(std::abs(h.total - o.total) < 1e-9);
      for (std::size_t k = 0; k < kComponentCount; ++k) CHECK(std::abs(h.components[k].points - o.parts[k]) < 1e-9);
    }
  }

  TEST_CASE("property: bounds and decomposition") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
      const auto h = score_hei(testing::random_profile(rng));
      CHECK(h.total >= 0);
      CHECK(h.total <= 100);
      double sum = 0;
      for (Component c : kAllComponents) {
        CHECK(h.points(c) >= 0);
        CHECK(h.points(c) <= S()[c].max_points);
        sum += h.points(c);
      }
      CHECK(std::abs(sum - h.total) < 1e-9);
    }
  }

  TEST_CASE("property: uniform scaling invariance") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
      const auto x = testing::random_profile(rng);
      const auto base = score_hei(x);
      for (double c : {0.5, 2.0, 10.0}) {
        IntakeProfile y = x;
        for (const auto& f : kIntakeFields) y.*f.member *= c;
        const auto h = score_hei(y);
        CHECK(std::abs(h.total - base.total) < 1e-9);
        for (std::size_t k = 0; k < kComponentCount; ++k) {
          CHECK(std::abs(h.components[k].points - base.components[k].points) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("property: monotonicity under single-field perturbation") {
    struct Field {
      double IntakeProfile::*member;
      Component component;
      int direction;  // +1 adequacy, -1 moderation
    };
    const std::vector<Field> fields{
        {&IntakeProfile::f_totfruit_cup, Component::TotalFruits, +1},
        {&IntakeProfile::f_totveg_cup, Component::TotalVegetables, +1},
        {&IntakeProfile::f_wholegrain_oz, Component::WholeGrains, +1},
        {&IntakeProfile::f_dairy_cup, Component::Dairy, +1},
        {&IntakeProfile::f_totprotein_oz, Component::TotalProtein, +1},
        {&IntakeProfile::f_refinedgrain_oz, Component::RefinedGrains, -1},
        {&IntakeProfile::sodium_mg, Component::Sodium, -1},
        {&IntakeProfile::added_sugars_g, Component::AddedSugars, -1},
        {&IntakeProfile::sfa_g, Component::SaturatedFats, -1},
    };
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
      const auto x = testing::random_profile(rng);
      const auto& f = fields[rng.below(fields.size())];
      IntakeProfile y = x;
      y.*f.member += rng.uniform(0.0, 5.0) * (f.member == &IntakeProfile::sodium_mg ? 500 : 1);
      const double before = score_hei(x).points(f.component);
      const double after = score_hei(y).points(f.component);
      if (f.direction > 0) {
        CHECK(after >= before - 1e-12);
      } else {
        CHECK(after <= before + 1e-12);
      }
    }
  }

  TEST_CASE("property: piecewise linearity between cut points") {
    for (Component c : kAllComponents) {
      const auto& s = S()[c];
      const double lo = std::min(s.std_for_max, s.std_for_min);
      const double hi = std::max(s.std_for_max, s.std_for_min);
      // Affine inside: equal finite differences at three interior points.
      const double h = (hi - lo) / 100;
      double prev_slope = 0;
      for (int j = 0; j < 3; ++j) {
        const double v = lo + (hi - lo) * (0.25 + 0.25 * j);
        const double slope = (score_component(v + h, s) - score_component(v - h, s)) / (2 * h);
        if (j > 0) CHECK(slope == doctest::Approx(prev_slope).epsilon(1e-9));
        prev_slope = slope;
      }
      // Constant outside.
      CHECK(score_component(hi + 1, s) == score_component(hi + 2, s));
      if (lo > 0) CHECK(score_component(lo / 2, s) == score_component(lo / 4, s));
    }
  }
}
