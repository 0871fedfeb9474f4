#include "heirag/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "heirag/error.hpp"
#include "heirag/evaluation.hpp"
#include "heirag/json_io.hpp"

namespace heirag {

namespace fs = std::filesystem;
using nlohmann::json;

// ServiceConfig -------------------------------------------------------------

ServiceConfig ServiceConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("service config must be a JSON object");
  static const std::vector<std::string> known{"host",  "port",       "persons",    "index",
                                              "config", "store",     "static_dir", "llm_enabled"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown service config key: " + key);
    }
  }
  ServiceConfig sc;
  try {
    if (doc.contains("host")) sc.host = doc.at("host").get<std::string>();
    if (doc.contains("port")) sc.port = doc.at("port").get<int>();
    if (doc.contains("persons")) sc.persons_path = doc.at("persons").get<std::string>();
    if (doc.contains("index")) sc.index_dir = doc.at("index").get<std::string>();
    if (doc.contains("config")) sc.config_path = doc.at("config").get<std::string>();
    if (doc.contains("store")) sc.store_path = doc.at("store").get<std::string>();
    if (doc.contains("static_dir")) sc.static_dir = doc.at("static_dir").get<std::string>();
    if (doc.contains("llm_enabled")) sc.llm_enabled = doc.at("llm_enabled").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
  return sc;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open service config " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("service config " + path + ": " + e.what());
  }
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range: " + std::to_string(port));
  if (persons_path.empty()) throw ConfigError("persons path is required");
  if (index_dir.empty()) throw ConfigError("index directory is required");
  if (!fs::is_regular_file(persons_path)) throw ConfigError("persons file not found: " + persons_path);
  if (!fs::is_directory(index_dir)) throw ConfigError("index directory not found: " + index_dir);
  if (config_path && !fs::is_regular_file(*config_path)) {
    throw ConfigError("config file not found: " + *config_path);
  }
  if (static_dir && !fs::is_directory(*static_dir)) {
    throw ConfigError("static directory not found: " + *static_dir);
  }
}

fs::path ServiceConfig::resolved_store_path() const {
  return store_path ? fs::path(*store_path) : fs::path(persons_path + ".posted.jsonl");
}

Response error_response(int status, std::string_view code, std::string_view message) {
  return {status, {{"code", std::string(code)}, {"message", std::string(message)}}};
}

// Service -------------------------------------------------------------------

namespace {

bool portion_allowed(double p, const std::vector<double>& allowed) {
  return std::any_of(allowed.begin(), allowed.end(), [p](double a) { return std::fabs(a - p) <= 1e-9; });
}

}  // namespace

Service::Service(FoodIndex index, std::vector<UserRecord> users, EngineConfig cfg, StandardsTable standards,
                 std::optional<fs::path> store, ChatFn chat)
    : index_(std::move(index)),
      engine_(index_, std::move(cfg), std::move(standards)),
      store_(std::move(store)),
      chat_(std::move(chat)) {
  for (auto& u : users) {
    const Seqn s = u.seqn;
    if (!users_.emplace(s, std::move(u)).second) {
      throw SchemaError("duplicate seqn " + std::to_string(s));
    }
  }
  if (engine_.config().llm.enabled && !chat_) {
    client_ = std::make_unique<LlmClient>(engine_.config().llm);
    chat_ = [c = client_.get()](const PromptBundle& b, std::string_view note) { return c->complete(b, note); };
  }
  replay_store();
}

std::unique_ptr<Service> Service::load(const ServiceConfig& sc) {
  sc.validate();
  EngineConfig cfg = sc.config_path ? EngineConfig::load(*sc.config_path) : EngineConfig{};
  cfg.llm.enabled = sc.llm_enabled;
  auto standards = standards_for(cfg);
  auto index = load_index(sc.index_dir);
  auto persons = load_persons(sc.persons_path);
  return std::make_unique<Service>(std::move(index), std::move(persons.users), std::move(cfg),
                                   std::move(standards), sc.resolved_store_path());
}

void Service::replay_store() {
  if (!store_ || !fs::exists(*store_)) return;
  std::ifstream in(*store_);
  if (!in) throw CorruptionError("cannot read user store " + store_->string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      auto u = user_from_json(json::parse(line));
      const Seqn s = u.seqn;
      if (!users_.emplace(s, std::move(u)).second) {
        throw CorruptionError("seqn " + std::to_string(s) + " already present");
      }
    } catch (const json::exception& e) {
      throw CorruptionError(store_->string() + " line " + std::to_string(n) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw CorruptionError(store_->string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
}

Response Service::health() const { return {200, {{"status", "ok"}}}; }

std::size_t Service::user_count() const {
  std::shared_lock lock(mu_);
  return users_.size();
}

std::optional<UserRecord> Service::user(Seqn seqn) const {
  std::shared_lock lock(mu_);
  auto it = users_.find(seqn);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

std::size_t Service::llm_requests() const { return client_ ? client_->requests_sent() : 0; }

Response Service::add_user(const json& body) {
  UserRecord u;
  try {
    u = user_from_json(body);
  } catch (const SchemaError& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const ArgumentError& e) {
    return error_response(400, "bad_request", e.what());
  }
  std::unique_lock lock(mu_);
  if (users_.count(u.seqn)) {
    return error_response(409, "duplicate_user", "seqn " + std::to_string(u.seqn) + " already exists");
  }
  if (store_) {
    std::ofstream out(*store_, std::ios::app);
    out << user_to_json(u).dump() << '\n';
    out.flush();
    if (!out) return error_response(500, "store_failure", "cannot append to " + store_->string());
  }
  json echo = user_to_json(u);
  users_.emplace(u.seqn, std::move(u));
  return {201, echo};
}

Response Service::user_hei(Seqn seqn) const {
  auto u = user(seqn);
  if (!u) return error_response(404, "unknown_user", "no user with seqn " + std::to_string(seqn));
  const auto& st = engine_.standards();
  return {200,
          {{"seqn", seqn},
           {"hei", hei_to_json(score_user(*u, st), st)},
           {"hei_of_mean_intake", hei_to_json(score_hei(u->intake, st), st)},
           {"days", u->days.size()}}};
}

Response Service::recommend(Seqn seqn, std::optional<std::size_t> k) const {
  auto u = user(seqn);
  if (!u) return error_response(404, "unknown_user", "no user with seqn " + std::to_string(seqn));
  if (k && *k == 0) return error_response(400, "bad_request", "k must be positive");

  const auto& st = engine_.standards();
  const auto rec = engine_.recommend(*u, k);

  Explanation ex;
  if (!rec.plan.steps.empty()) {
    const auto bundle = assemble_prompt(*u, rec.baseline_hei, rec.ranked, index_, st,
                                        engine_.config().recommender, &rec.plan);
    ex = explain(bundle, rec.plan, index_, engine_.config().llm, chat_);
  }

  json recs = json::array();
  for (const auto& r : ex.recommendations) recs.push_back(grounded_to_json(r));

  json alternatives = json::array();
  for (const auto& c : rec.ranked) {
    const bool in_plan = std::any_of(rec.plan.steps.begin(), rec.plan.steps.end(), [&](const PlanStep& s) {
      return s.modification.food_code == c.food_code;
    });
    if (!in_plan) alternatives.push_back(candidate_to_json(c, index_));
  }

  json deficits = json::array();
  for (Component c : rec.query.deficit_components) deficits.push_back(std::string(component_id(c)));

  return {200,
          {{"seqn", seqn},
           {"baseline_hei", hei_to_json(rec.baseline_hei, st)},
           {"query", {{"text", rec.query.query_text}, {"deficit_components", deficits}}},
           {"plan", plan_to_json(rec.plan, st)},
           {"recommendations", recs},
           {"explainer", ex.from_llm ? "llm" : "fallback"},
           {"llm_calls", ex.llm_calls},
           {"alternatives", alternatives}}};
}

Response Service::whatif(const json& body) const {
  if (!body.is_object()) return error_response(400, "bad_request", "request body must be a JSON object");
  for (const auto& [key, _] : body.items()) {
    if (key != "seqn" && key != "intake" && key != "food_code" && key != "portion" && key != "mode" &&
        key != "swap_base") {
      return error_response(400, "bad_request", "unknown field: " + key);
    }
  }

  IntakeProfile x;
  if (body.contains("intake")) {
    try {
      x = intake_from_json(body.at("intake"));
    } catch (const SchemaError& e) {
      return error_response(400, "bad_request", e.what());
    }
  } else if (body.contains("seqn")) {
    if (!body.at("seqn").is_number_integer()) return error_response(400, "bad_request", "seqn must be an integer");
    const auto seqn = body.at("seqn").get<Seqn>();
    auto u = user(seqn);
    if (!u) return error_response(404, "unknown_user", "no user with seqn " + std::to_string(seqn));
    x = u->intake;
  } else {
    return error_response(400, "bad_request", "either seqn or intake is required");
  }

  if (!body.contains("food_code") || !body.at("food_code").is_number_integer()) {
    return error_response(400, "bad_request", "food_code must be an integer");
  }
  Modification m;
  m.food_code = body.at("food_code").get<FoodCode>();
  if (body.contains("portion")) {
    if (!body.at("portion").is_number()) return error_response(400, "bad_request", "portion must be a number");
    m.portion = body.at("portion").get<double>();
  }
  if (body.contains("mode")) {
    const auto mode = body.at("mode").is_string() ? parse_mode(body.at("mode").get<std::string>()) : std::nullopt;
    if (!mode) return error_response(400, "bad_request", "mode must be \"add\" or \"swap\"");
    m.mode = *mode;
  }
  if (body.contains("swap_base")) {
    if (!body.at("swap_base").is_number_integer()) {
      return error_response(400, "bad_request", "swap_base must be an integer");
    }
    m.swap_base = body.at("swap_base").get<FoodCode>();
  }

  const FoodItem* food = index_.food(m.food_code);
  if (!food) return error_response(404, "unknown_food", "no food with code " + std::to_string(m.food_code));
  if (!portion_allowed(m.portion, engine_.config().recommender.portions)) {
    return error_response(422, "invalid_portion", "portion is not one of the allowed serving factors");
  }
  const FoodItem* base = nullptr;
  if (m.mode == ModMode::Swap) {
    if (!m.swap_base) return error_response(400, "bad_request", "swap mode requires swap_base");
    base = index_.food(*m.swap_base);
    if (!base) return error_response(404, "unknown_food", "no food with code " + std::to_string(*m.swap_base));
  }

  const auto& st = engine_.standards();
  const auto d = delta_hei(x, *food, m, st, base);
  return {200,
          {{"modification", modification_to_json(m)},
           {"before", hei_to_json(d.before, st)},
           {"after", hei_to_json(d.after, st)},
           {"delta_h", d.delta_h},
           {"component_deltas", deltas_to_json(d.components)},
           {"intake_after", intake_to_json(d.modified)}}};
}

Response Service::search_foods(std::string_view query, std::size_t k) const {
  if (query.empty()) return error_response(400, "bad_request", "query text is required");
  if (k == 0) return error_response(400, "bad_request", "k must be positive");
  if (index_.empty()) return {200, {{"query", std::string(query)}, {"results", json::array()}}};
  if (!engine_.encoder()) {
    return error_response(400, "unsupported", "index has no local text encoder");
  }
  const auto q = engine_.encoder()(query);
  const auto hits = search(index_, q.view(), std::min(k, index_.size()));
  json results = json::array();
  for (const auto& h : hits) {
    const auto* f = index_.food(h.food_code);
    results.push_back({{"food_code", h.food_code},
                       {"description", f->description},
                       {"serving_desc", f->serving_desc},
                       {"similarity", h.similarity}});
  }
  return {200, {{"query", std::string(query)}, {"results", results}}};
}

Response Service::evaluate(const json& body) const {
  if (!body.is_null() && !body.is_object()) {
    return error_response(400, "bad_request", "request body must be a JSON object");
  }
  EngineConfig cfg = engine_.config();
  std::uint64_t seed = 42;
  if (body.is_object()) {
    for (const auto& [key, _] : body.items()) {
      if (key != "seed" && key != "ratio") return error_response(400, "bad_request", "unknown field: " + key);
    }
    if (body.contains("seed")) {
      const auto& sv = body.at("seed");
      if (!sv.is_number_integer() || (!sv.is_number_unsigned() && sv.get<std::int64_t>() < 0)) {
        return error_response(400, "bad_request", "seed must be a non-negative integer");
      }
      seed = body.at("seed").get<std::uint64_t>();
    }
    if (body.contains("ratio")) {
      if (!body.at("ratio").is_number()) return error_response(400, "bad_request", "ratio must be a number");
      cfg.evaluation.split_ratio = body.at("ratio").get<double>();
    }
  }
  if (!(cfg.evaluation.split_ratio > 0 && cfg.evaluation.split_ratio < 1)) {
    return error_response(400, "bad_request", "ratio must be in (0, 1)");
  }

  std::vector<UserRecord> users;
  {
    std::shared_lock lock(mu_);
    users.reserve(users_.size());
    for (const auto& [_, u] : users_) users.push_back(u);
  }
  if (users.size() < 2) return error_response(400, "bad_request", "evaluation needs at least 2 users");

  const RecommendationEngine engine(index_, cfg, engine_.standards(), engine_.encoder());
  const auto report = run_evaluation(std::move(users), engine, seed);
  json doc = report.to_json();
  doc["summary_table"] = report.summary_table();
  return {200, doc};
}

}  // namespace heirag
