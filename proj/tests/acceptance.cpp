// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "heirag/error.hpp"
#include "heirag/evaluation.hpp"
#include "heirag/explainer.hpp"
#include "heirag/gateway.hpp"
#include "heirag/json_io.hpp"
#include "explain_fixture.hpp"
#include "stub_llm.hpp"
#include "support.hpp"

using namespace heirag;
using nlohmann::json;

namespace {

/// Collects failure messages for one criterion.
struct Checker {
  std::vector<std::string> failures;
  long checks = 0;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures.size() < 10) failures.push_back(what);
    if (!ok && failures.size() == 10) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<void(Checker&)> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// HEI -------------------------------------------------------------------------

void hei_oracle(Checker& c) {
  const auto zero = score_hei(testing::energy_only(2000));
  c.expect(std::abs(zero.total - 40) < 1e-6, "energy-only profile total " + fmt(zero.total));

  IntakeProfile none;
  none.sodium_mg = 3000;
  c.expect(score_hei(none).total == 0, "zero-energy profile is not 0");

  IntakeProfile best = testing::energy_only(2000);
  best.f_totfruit_cup = 1.6;
  best.f_wholefruit_cup = 0.8;
  best.f_totveg_cup = 2.2;
  best.f_greensbeans_cup = 0.4;
  best.f_wholegrain_oz = 3.0;
  best.f_dairy_cup = 2.6;
  best.f_totprotein_oz = 5.0;
  best.f_seaplant_oz = 1.6;
  best.f_refinedgrain_oz = 3.6;
  best.sodium_mg = 2200;
  best.added_sugars_g = 0.065 * 2000 / 4;
  best.sfa_g = 0.08 * 2000 / 9;
  best.mufa_g = best.pufa_g = 1.25 * best.sfa_g;
  const double top = score_hei(best).total;
  c.expect(std::abs(top - 100) < 1e-6, "saturating profile total " + fmt(top));

  const auto& S = StandardsTable::defaults();
  Rng rng(20240501);
  for (int i = 0; i < 2000; ++i) {
    const auto x = testing::random_profile(rng);
    const auto h = score_hei(x);
    const auto o = testing::oracle_hei(x);
    c.expect(std::abs(h.total - o.total) < 1e-9, "oracle disagreement on profile " + std::to_string(i));
    double sum = 0;
    for (auto comp : kAllComponents) {
      const double p = h.points(comp);
      c.expect(p >= 0 && p <= S[comp].max_points, "component out of bounds");
      sum += p;
    }
    c.expect(h.total >= 0 && h.total <= 100, "total out of bounds");
    c.expect(std::abs(sum - h.total) < 1e-9, "decomposition mismatch");
  }

  for (int i = 0; i < 500; ++i) {
    const auto x = testing::random_profile(rng);
    const auto base = score_hei(x);
    for (double k : {0.5, 2.0, 10.0}) {
      IntakeProfile y = x;
      for (const auto& f : kIntakeFields) y.*f.member *= k;
      const auto h = score_hei(y);
      bool same = std::abs(h.total - base.total) < 1e-9;
      for (std::size_t j = 0; j < kComponentCount; ++j) {
        same = same && std::abs(h.components[j].points - base.components[j].points) < 1e-9;
      }
      c.expect(same, "scaling by " + fmt(k) + " changed the score");
    }
  }

  struct Field {
    double IntakeProfile::*member;
    Component comp;
    int sign;
    double scale;
  };
  const std::vector<Field> fields{
      {&IntakeProfile::f_totfruit_cup, Component::TotalFruits, +1, 1},
      {&IntakeProfile::f_wholefruit_cup, Component::WholeFruits, +1, 1},
      {&IntakeProfile::f_totveg_cup, Component::TotalVegetables, +1, 1},
      {&IntakeProfile::f_greensbeans_cup, Component::GreensAndBeans, +1, 1},
      {&IntakeProfile::f_wholegrain_oz, Component::WholeGrains, +1, 1},
      {&IntakeProfile::f_dairy_cup, Component::Dairy, +1, 1},
      {&IntakeProfile::f_totprotein_oz, Component::TotalProtein, +1, 1},
      {&IntakeProfile::f_seaplant_oz, Component::SeafoodPlantProteins, +1, 1},
      {&IntakeProfile::mufa_g, Component::FattyAcids, +1, 5},
      {&IntakeProfile::f_refinedgrain_oz, Component::RefinedGrains, -1, 1},
      {&IntakeProfile::sodium_mg, Component::Sodium, -1, 500},
      {&IntakeProfile::added_sugars_g, Component::AddedSugars, -1, 10},
      {&IntakeProfile::sfa_g, Component::SaturatedFats, -1, 5},
  };
  for (int i = 0; i < 1000; ++i) {
    const auto x = testing::random_profile(rng);
    const auto& f = fields[rng.below(fields.size())];
    IntakeProfile y = x;
    y.*f.member += rng.uniform(0.0, 3.0) * f.scale;
    const double before = score_hei(x).points(f.comp);
    const double after = score_hei(y).points(f.comp);
    c.expect(f.sign > 0 ? after >= before - 1e-12 : after <= before + 1e-12,
             "monotonicity violated for " + std::string(component_name(f.comp)));
  }
}

// Retrieval -------------------------------------------------------------------

std::vector<float> random_unit(Rng& rng, std::size_t dim) {
  std::vector<float> v(dim);
  double n = 0;
  for (auto& x : v) {
    x = static_cast<float>(rng.normal());
    n += double(x) * x;
  }
  n = std::sqrt(n);
  for (auto& x : v) x = static_cast<float>(x / n);
  return v;
}

void retrieval_oracle(Checker& c) {
  const auto ix = build_index(gen_synthetic_foods(42, 200));
  c.expect(ix.size() == 200, "corpus size " + std::to_string(ix.size()));
  Rng rng(4242);
  for (int t = 0; t < 100; ++t) {
    const auto q = random_unit(rng, ix.dim());
    std::vector<std::pair<double, FoodCode>> all;
    for (std::size_t i = 0; i < ix.size(); ++i) {
      double s = 0;
      const auto row = ix.row(i);
      for (std::size_t d = 0; d < row.size(); ++d) s += double(q[d]) * double(row[d]);
      all.emplace_back(s, ix.item(i).food_code);
    }
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    const auto hits = search(ix, q, 10);
    bool same = hits.size() == 10;
    for (std::size_t i = 0; same && i < 10; ++i) same = hits[i].food_code == all[i].second;
    c.expect(same, "query " + std::to_string(t) + " differs from the exhaustive oracle");

    const auto wide = search(ix, q, 25);
    c.expect(mmr_rerank(wide, ix, 1.0, 25) == wide, "MMR(lambda=1) reordered query " + std::to_string(t));
  }

  // Two identical rows and one orthogonal row.
  std::vector<FoodItem> items;
  for (FoodCode code : {1, 2, 3}) items.push_back(testing::make_food(code, "item", testing::energy_only(100)));
  std::vector<float> m(3 * 8, 0.0f);
  m[0] = 1;
  m[8] = 1;
  m[17] = 1;
  const auto dup = build_index_from_vectors(items, m, 8);
  const std::vector<ScoredFood> cands{{1, 0.9}, {2, 0.9}, {3, 0.8}};
  const auto out = mmr_rerank(cands, dup, 0.5, 3);
  c.expect(out.size() == 3 && out[0].food_code == 1 && out[1].food_code == 3 && out[2].food_code == 2,
           "duplicate vector was not demoted");
}

// Recommendation ----------------------------------------------------------------

struct SyntheticWorld {
  FoodIndex synthetic_index = build_index(gen_synthetic_foods(42, 200));
  FoodIndex fixture_index = build_index(testing::fixture_foods());
  std::vector<UserRecord> users = gen_synthetic_population(42, 12076);
  std::vector<UserRecord> test_users = split_population(users, 0.8, 42).test;
};

const SyntheticWorld& world() {
  static const SyntheticWorld w;
  return w;
}

void check_plan(Checker& c, const Plan& p, const RecommenderConfig& cfg, const std::string& tag) {
  double sum = 0;
  for (const auto& s : p.steps) {
    c.expect(s.delta_h >= 0, tag + ": negative step delta " + fmt(s.delta_h));
    sum += s.delta_h;
  }
  c.expect(p.improvement() >= 0, tag + ": negative improvement");
  c.expect(std::abs(sum - p.improvement()) <= 1e-6, tag + ": step sum " + fmt(sum) + " != " + fmt(p.improvement()));
  const double e0 = p.baseline_intake.energy_kcal;
  const double drift = std::abs(p.final_intake.energy_kcal - e0);
  c.expect(drift <= cfg.energy_frac * e0 + 1e-6, tag + ": energy drift " + fmt(drift / e0));
  c.expect(std::abs(testing::oracle_hei(p.final_intake).total - p.final_hei.total) < 1e-9,
           tag + ": final score disagrees with the oracle");
  c.expect(p.steps.size() <= cfg.m_max, tag + ": too many steps");
}

void recommendation_soundness(Checker& c) {
  const auto& w = world();
  c.expect(w.test_users.size() == 2416, "test population " + std::to_string(w.test_users.size()));
  EngineConfig cfg;
  for (const FoodIndex* ix : {&w.synthetic_index, &w.fixture_index}) {
    const RecommendationEngine engine(*ix, cfg, StandardsTable::defaults());
    std::size_t with_steps = 0;
    for (const auto& u : w.test_users) {
      const auto rec = engine.recommend(u);
      check_plan(c, rec.plan, cfg.recommender, "seqn " + std::to_string(u.seqn));
      with_steps += !rec.plan.steps.empty();
    }
    c.expect(with_steps > 0, "no user received a plan");
  }
}

// Evaluation --------------------------------------------------------------------

void evaluation_protocol(Checker& c) {
  const auto& w = world();
  const auto split = split_population(w.users, 0.8, 42);
  c.expect(split.train.size() == 9660 && split.test.size() == 2416,
           "split " + std::to_string(split.train.size()) + "/" + std::to_string(split.test.size()));

  const std::vector<double> s{40, 60, 55};
  c.expect(proportion_above(s, 50) == 2.0 / 3.0, "p([40,60,55], 50) != 2/3");
  const std::vector<double> edge{50};
  c.expect(proportion_above(edge, 50) == 0, "a score equal to tau was counted");

  const RecommendationEngine engine(w.synthetic_index, EngineConfig{}, StandardsTable::defaults());
  const auto r1 = run_evaluation(w.users, engine, 42);
  const auto r2 = run_evaluation(w.users, engine, 42);
  std::vector<double> before, after;
  for (const auto& r : r1.results) {
    before.push_back(r.h_base);
    after.push_back(r.h_rec);
  }
  for (double tau : {30.0, 40.0, 50.0, 60.0, 70.0}) {
    c.expect(proportion_above(after, tau) >= proportion_above(before, tau), "dominance fails at tau " + fmt(tau));
  }
  c.expect(r1.mean_delta > 0, "mean_delta " + fmt(r1.mean_delta));
  c.expect(r1.to_json().dump() == r2.to_json().dump(), "report JSON differs across runs");

  std::istringstream table(r1.summary_table());
  std::vector<std::string> rows;
  for (std::string line; std::getline(table, line);) {
    if (line.find("Percentile") != std::string::npos) rows.push_back(line.substr(0, line.find(" |")));
  }
  c.expect(rows == std::vector<std::string>{"25th Percentile", "50th Percentile", "75th Percentile"},
           "summary table rows");
  std::printf("  synthetic run: n_test=%zu mean_delta=%.2f sd=%.2f p(50) %.4f -> %.4f\n", r1.n_test, r1.mean_delta,
              r1.sd_delta, r1.p_before, r1.p_after);
}

// Grounding -----------------------------------------------------------------------

/// One random mutation of a well-formed answer.
std::string mutate(Rng& rng, const testing::ExplainFixture& fx) {
  const auto& allowed = fx.bundle.allowed_codes;
  json recs = json::array();
  const std::size_t n = 1 + rng.below(allowed.size());
  for (std::size_t i = 0; i < n; ++i) {
    recs.push_back({{"food_code", allowed[rng.below(allowed.size())]},
                    {"portion", fx.cfg.portions[rng.below(fx.cfg.portions.size())]},
                    {"rationale", "Improves the weakest components."},
                    {"cited_components", {"Dairy"}}});
  }
  json doc{{"recommendations", recs}};
  auto& target = doc["recommendations"][rng.below(n)];

  auto foreign_code = [&]() -> json {
    switch (rng.below(8)) {
      case 0: return json(allowed[rng.below(allowed.size())] + 1 + static_cast<FoodCode>(rng.below(3)));
      case 1: return json(-static_cast<std::int64_t>(allowed[0]));
      case 2: return json(static_cast<FoodCode>(rng.below(100000)));
      case 3: return json(std::to_string(allowed[0]));
      case 4: return json(static_cast<double>(allowed[0]) + 0.5);
      case 5: return json(std::numeric_limits<std::uint64_t>::max());
      case 6: return json(nullptr);
      default: {
        // A real food that was not offered.
        for (const auto& f : fx.index.items()) {
          if (!fx.bundle.allows(f.food_code)) return json(f.food_code);
        }
        return json(99999);
      }
    }
  };

  switch (rng.below(10)) {
    case 0:
    case 1:
    case 2: target["food_code"] = foreign_code(); break;
    case 3: target.erase("food_code"); break;
    case 4: target["portion"] = rng.uniform(0.0, 3.0); break;
    case 5: doc["recommendations"].push_back(target); break;
    case 6: target["cited_components"] = json::array({"Calories"}); break;
    case 7: target["rationale"] = rng.bernoulli(0.5) ? json("") : json(7); break;
    case 8: doc = json{{"recommendations", json{{"food_code", foreign_code()}}}}; break;
    default: break;
  }

  std::string text = doc.dump();
  switch (rng.below(6)) {
    case 0: text = text.substr(0, rng.below(text.size() + 1)); break;
    case 1: text.insert(rng.below(text.size() + 1), 1, static_cast<char>(32 + rng.below(95))); break;
    case 2: text = "```json\n" + text + "\n```"; break;
    case 3: {
      // Swap a digit inside the text.
      const auto pos = text.find_first_of("0123456789", rng.below(text.size()));
      if (pos != std::string::npos) text[pos] = static_cast<char>('0' + rng.below(10));
      break;
    }
    default: break;
  }
  return text;
}

void grounding_safety(Checker& c) {
  Rng rng(10000);
  std::vector<testing::ExplainFixture> fixtures;
  for (std::size_t k : {1u, 3u, 5u, 8u}) fixtures.emplace_back(k);
  std::size_t accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& fx = fixtures[rng.below(fixtures.size())];
    const auto raw = mutate(rng, fx);
    try {
      const auto recs = validate_grounding(raw, fx.bundle);
      ++accepted;
      std::set<FoodCode> seen;
      for (const auto& r : recs) {
        c.expect(fx.bundle.allows(r.food_code), "accepted foreign code " + std::to_string(r.food_code));
        c.expect(seen.insert(r.food_code).second, "accepted a duplicate code");
      }
    } catch (const GroundingError&) {
    } catch (const std::exception& e) {
      c.expect(false, std::string("non-grounding exception: ") + e.what());
    }
  }
  c.expect(accepted > 0, "fuzzer never produced a valid answer");
  std::printf("  fuzzing: 10000 responses, %zu accepted, %zu rejected\n", accepted, 10000 - accepted);

  // Fallback output validates for real plans.
  const RecommendationEngine engine(world().synthetic_index, EngineConfig{}, StandardsTable::defaults());
  for (std::size_t i = 0; i < world().test_users.size(); i += 5) {
    const auto& u = world().test_users[i];
    const auto rec = engine.recommend(u);
    if (rec.plan.steps.empty()) continue;
    const auto bundle = assemble_prompt(u, rec.baseline_hei, rec.ranked, engine.index(), engine.standards(),
                                        engine.config().recommender, &rec.plan);
    const auto fb = fallback_explain(rec.plan, engine.index());
    try {
      const auto back = validate_grounding(testing::ExplainFixture::as_response(fb), bundle);
      double sum = 0;
      for (const auto& g : back) sum += g.anticipated_delta;
      c.expect(std::abs(sum - rec.plan.improvement()) < 1e-9, "fallback deltas do not re-sum");
    } catch (const GroundingError& e) {
      c.expect(false, std::string("fallback rejected: ") + e.what());
    }
  }

  // Outbound call budget against a stub endpoint.
  testing::StubLlm stub;
  ::setenv("HEIRAG_ACCEPTANCE_KEY", "sk-acceptance", 1);
  EngineConfig cfg;
  cfg.llm.enabled = true;
  cfg.llm.base_url = stub.base_url();
  cfg.llm.api_key_env = "HEIRAG_ACCEPTANCE_KEY";
  cfg.llm.timeout_s = 5;
  Service svc(build_index(testing::fixture_foods()), {testing::make_user(1, testing::energy_only(2000))}, cfg,
              StandardsTable::defaults());
  struct Scenario {
    const char* name;
    std::function<void()> arrange;
    int max_hits;
    const char* explainer;
  };
  const std::vector<Scenario> scenarios{
      {"ungrounded", [&] { stub.reply({testing::ExplainFixture::answer({99999})}); }, 2, "fallback"},
      {"garbage", [&] { stub.reply({"I suggest kale."}); }, 2, "fallback"},
      {"http 500", [&] { stub.fail_with(500); }, 2, "fallback"},
  };
  for (const auto& s : scenarios) {
    s.arrange();
    const int before = stub.hits();
    const auto r = svc.recommend(1);
    const int used = stub.hits() - before;
    c.expect(r.status == 200, std::string(s.name) + ": status " + std::to_string(r.status));
    c.expect(used <= s.max_hits && used >= 1, std::string(s.name) + ": " + std::to_string(used) + " calls");
    c.expect(r.body["explainer"] == s.explainer, std::string(s.name) + ": explainer " + r.body["explainer"].dump());
  }
  stub.fail_with(200);
  const auto offered = svc.engine().recommend(*svc.user(1)).ranked.front().food_code;
  stub.reply({"```json\n" + testing::ExplainFixture::answer({offered}) + "\n```"});
  const int before = stub.hits();
  const auto good = svc.recommend(1);
  c.expect(stub.hits() - before == 1, "grounded answer took more than one call");
  c.expect(good.body["explainer"] == "llm", "grounded answer was not used");
  ::unsetenv("HEIRAG_ACCEPTANCE_KEY");
}

// Service -----------------------------------------------------------------------

void service_contract(Checker& c) {
  std::vector<UserRecord> users;
  Rng rng(6);
  users.push_back(testing::make_user(1001, testing::energy_only(2000)));
  for (Seqn s = 1002; s < 1020; ++s) users.push_back(testing::make_user(s, testing::random_profile(rng)));
  Service svc(build_index(testing::fixture_foods()), users, EngineConfig{}, StandardsTable::defaults());
  HttpGateway gw(svc);
  const int port = gw.bind("127.0.0.1", 0);
  gw.start();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(10, 0);

  auto get = [&](const std::string& path) -> std::pair<int, json> {
    auto res = cli.Get(path);
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body, nullptr, false)};
  };
  auto post = [&](const std::string& path, const json& body) -> std::pair<int, json> {
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body, nullptr, false)};
  };

  auto [hs, hb] = get("/health");
  c.expect(hs == 200 && hb == json{{"status", "ok"}}, "GET /health");

  auto [us, ub] = get("/users/999999/hei");
  c.expect(us == 404 && ub.value("code", "") == "unknown_user", "unknown user");

  auto [ps, pb] = post("/whatif", {{"seqn", 1001}, {"food_code", 50000}, {"portion", 2.0}});
  c.expect(ps == 422 && pb.value("code", "") == "invalid_portion", "portion 2.0");

  auto [fs_, fb] = post("/whatif", {{"seqn", 1001}, {"food_code", 777777}});
  c.expect(fs_ == 404 && fb.value("code", "") == "unknown_food", "unknown food");

  for (const auto& u : users) {
    auto [rs, rb] = get("/users/" + std::to_string(u.seqn) + "/recommendations?k=5");
    c.expect(rs == 200, "recommend status for " + std::to_string(u.seqn));
    if (rs != 200) continue;
    c.expect(rb["explainer"] == "fallback", "explainer flag with the model disabled");
    c.expect(rb["baseline_hei"]["components"].size() == kComponentCount, "baseline components");
    std::set<FoodCode> plan_codes;
    for (const auto& s : rb["plan"]["steps"]) plan_codes.insert(s["modification"]["food_code"].get<FoodCode>());
    std::set<FoodCode> alts;
    for (const auto& a : rb["alternatives"]) {
      const auto code = a["food_code"].get<FoodCode>();
      c.expect(!plan_codes.count(code) && alts.insert(code).second, "alternative repeats a code");
    }
    double sum = 0;
    for (const auto& g : rb["recommendations"]) {
      sum += g["anticipated_delta"].get<double>();
      c.expect(g["rationale"].get<std::string>().starts_with("Adds "), "rationale is not the template");
    }
    c.expect(std::abs(sum - rb["plan"]["improvement"].get<double>()) < 1e-9, "anticipated deltas do not re-sum");
  }

  auto [zs, zb] = post("/whatif", {{"seqn", 1003}, {"food_code", 50006}, {"portion", 1.5}});
  bool zero = zs == 200 && zb["delta_h"] == 0.0;
  if (zero) {
    for (const auto& [k, v] : zb["component_deltas"].items()) zero = zero && v == 0.0;
  }
  c.expect(zero, "zero-effect food");

  const json same{{"seqn", 1004}, {"food_code", 50004}, {"portion", 0.5}};
  c.expect(post("/whatif", same) == post("/whatif", same), "what-if is not repeatable");

  const auto& ix = svc.index();
  for (int i = 0; i < 200; ++i) {
    const auto x = testing::random_profile(rng);
    const auto& food = ix.item(rng.below(ix.size()));
    const double portion = EngineConfig{}.recommender.portions[rng.below(3)];
    auto [ws, wb] = post("/whatif", {{"intake", intake_to_json(x)}, {"food_code", food.food_code}, {"portion", portion}});
    const auto d = delta_hei(x, food, {food.food_code, ModMode::Add, portion, {}});
    c.expect(ws == 200 && std::abs(wb["delta_h"].get<double>() - d.delta_h) <= 1e-9,
             "what-if disagrees with delta_hei for food " + std::to_string(food.food_code));
  }
  const auto stored = svc.user(1001);
  auto [ss, sb] = post("/whatif", {{"seqn", 1001}, {"food_code", 50000}});
  const auto d = delta_hei(stored->intake, *ix.food(50000), {50000, ModMode::Add, 1.0, {}});
  c.expect(ss == 200 && std::abs(sb["delta_h"].get<double>() - d.delta_h) <= 1e-9, "stored-user what-if");
  c.expect(svc.user(1001)->intake == stored->intake, "what-if mutated the store");

  gw.stop();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"HEI scoring oracle and property suite", 5.0, hei_oracle},
      {"Retrieval oracle equivalence", 5.0, retrieval_oracle},
      {"Recommendation soundness", 60.0, recommendation_soundness},
      {"Evaluation protocol", 120.0, evaluation_protocol},
      {"Grounding safety", 120.0, grounding_safety},
      {"Service contract", 60.0, service_contract},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < cr.budget_s, "runtime " + fmt(secs) + " s over the " + fmt(cr.budget_s) + " s budget");
    const bool ok = c.ok();
    failed += !ok;
    std::printf("%s  %s  (%ld checks, %.2f s)\n", ok ? "PASS" : "FAIL", cr.name.c_str(), c.checks, secs);
    for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
