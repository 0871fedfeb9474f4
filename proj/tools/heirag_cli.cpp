#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "heirag/config.hpp"
#include "heirag/error.hpp"
#include "heirag/evaluation.hpp"
#include "heirag/gateway.hpp"
#include "heirag/hei.hpp"
#include "heirag/ingest.hpp"
#include "heirag/json_io.hpp"
#include "heirag/pipeline.hpp"

using namespace heirag;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 42;
};

EngineConfig engine_config(const Globals& g) {
  return g.config_path.empty() ? EngineConfig{} : EngineConfig::load(g.config_path);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError(path + ": " + std::string(e.what()));
  }
}

/// Prints a service response; non-2xx responses become exit code 1.
int emit(const Response& r) {
  std::cout << r.body.dump(2) << '\n';
  return r.status >= 200 && r.status < 300 ? 0 : 1;
}

std::unique_ptr<Service> offline_service(const Globals& g, const std::string& persons, const std::string& index_dir) {
  auto cfg = engine_config(g);
  auto standards = standards_for(cfg);
  auto users = load_persons(persons).users;
  return std::make_unique<Service>(load_index(index_dir), std::move(users), std::move(cfg), std::move(standards));
}

HttpGateway* g_gateway = nullptr;

extern "C" void on_signal(int) {
  if (g_gateway) g_gateway->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HEI-2020 diet quality scoring and food recommendation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Engine configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse, link, filter and average a persons table");
  std::string ing_persons, ing_out, ing_report;
  ingest->add_option("--persons", ing_persons, "persons.csv")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ing_out, "Cleaned persons.csv")->required();
  ingest->add_option("--report", ing_report, "Drop/filter report JSON (stdout when omitted)");

  // build-index
  auto* build = app.add_subcommand("build-index", "Embed a foods table and write an index directory");
  std::string bi_foods, bi_out, bi_embeddings;
  std::size_t bi_dim = kDefaultEmbeddingDim;
  build->add_option("--foods", bi_foods, "foods.csv")->required()->check(CLI::ExistingFile);
  build->add_option("--out", bi_out, "Output directory")->required();
  build->add_option("--embeddings", bi_embeddings, "Precomputed vectors file (rows in foods order)")
      ->check(CLI::ExistingFile);
  build->add_option("--dim", bi_dim, "Embedding dimension");

  // score
  auto* score = app.add_subcommand("score", "HEI-2020 scores for every user in a persons table");
  std::string sc_persons, sc_out;
  std::optional<Seqn> sc_seqn;
  score->add_option("--persons", sc_persons, "persons.csv")->required()->check(CLI::ExistingFile);
  score->add_option("--seqn", sc_seqn, "Only this user");
  score->add_option("--out", sc_out, "Output JSON (stdout when omitted)");

  // recommend
  auto* recommend = app.add_subcommand("recommend", "Recommendation payload for one user");
  std::string rc_persons, rc_index;
  Seqn rc_seqn = 0;
  std::optional<std::size_t> rc_k;
  recommend->add_option("--persons", rc_persons, "persons.csv")->required()->check(CLI::ExistingFile);
  recommend->add_option("--index", rc_index, "Index directory")->required()->check(CLI::ExistingDirectory);
  recommend->add_option("--seqn", rc_seqn, "User")->required();
  recommend->add_option("--k", rc_k, "Number of foods offered");

  // whatif
  auto* whatif = app.add_subcommand("whatif", "Project the HEI effect of one modification");
  std::string wi_persons, wi_index, wi_intake, wi_mode = "add";
  std::optional<Seqn> wi_seqn;
  std::optional<FoodCode> wi_base;
  FoodCode wi_food = 0;
  double wi_portion = 1.0;
  whatif->add_option("--persons", wi_persons, "persons.csv")->check(CLI::ExistingFile);
  whatif->add_option("--index", wi_index, "Index directory")->required()->check(CLI::ExistingDirectory);
  auto* wi_seqn_opt = whatif->add_option("--seqn", wi_seqn, "Stored user");
  auto* wi_intake_opt = whatif->add_option("--intake", wi_intake, "Inline intake JSON file")->check(CLI::ExistingFile);
  wi_seqn_opt->excludes(wi_intake_opt);
  whatif->add_option("--food", wi_food, "Food code")->required();
  whatif->add_option("--portion", wi_portion, "Serving factor");
  whatif->add_option("--mode", wi_mode, "add or swap")->check(CLI::IsMember({"add", "swap"}));
  whatif->add_option("--swap-base", wi_base, "Food replaced in swap mode");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Offline train/test evaluation");
  std::string sim_persons, sim_index, sim_out;
  simulate->add_option("--persons", sim_persons, "persons.csv")->required()->check(CLI::ExistingFile);
  simulate->add_option("--index", sim_index, "Index directory")->required()->check(CLI::ExistingDirectory);
  simulate->add_option("--out", sim_out, "Report JSON")->required();

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic persons and/or foods table");
  std::size_t gen_n = 12076, gen_foods_n = 200;
  std::string gen_persons, gen_foods;
  gen->add_option("--n", gen_n, "Number of persons");
  gen->add_option("--foods-n", gen_foods_n, "Number of foods");
  gen->add_option("--persons-out", gen_persons, "persons.csv to write");
  gen->add_option("--foods-out", gen_foods, "foods.csv to write");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  std::string sv_file;
  ServiceConfig sv;
  serve->add_option("--service-config", sv_file, "Service configuration JSON")->check(CLI::ExistingFile);
  serve->add_option("--persons", sv.persons_path, "persons.csv");
  serve->add_option("--index", sv.index_dir, "Index directory");
  serve->add_option("--host", sv.host, "Bind address");
  serve->add_option("--port", sv.port, "Port (0 picks a free one)");
  serve->add_option("--store", sv.store_path, "Append-only file for posted users");
  serve->add_option("--static", sv.static_dir, "Directory served under /app");
  serve->add_flag("--llm", sv.llm_enabled, "Explain recommendations with the chat model");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::ifstream in(ing_persons);
      auto table = parse_person_table(in);
      auto linked = link_and_average(table.days, table.profiles);
      const std::size_t linked_n = linked.users.size();
      auto filtered = apply_quality_filter(std::move(linked.users));
      std::ofstream out(ing_out);
      if (!out) throw ArgumentError("cannot write " + ing_out);
      write_person_rows(out, filtered.kept);
      json report = {{"rows", table.days.size()},
                     {"linked_users", linked_n},
                     {"dropped_unlinked", linked.dropped.count},
                     {"dropped_seqns", linked.dropped.seqns},
                     {"excluded", filtered.report.excluded},
                     {"kept", filtered.kept.size()}};
      write_text(ing_report, report.dump(2) + "\n");
      return 0;
    }

    if (*build) {
      auto foods = load_foods(bi_foods);
      FoodIndex index;
      if (!bi_embeddings.empty()) {
        auto vf = read_vector_file(bi_embeddings);
        if (vf.rows() != foods.size()) {
          throw CorruptionError("embeddings file has " + std::to_string(vf.rows()) + " rows for " +
                                std::to_string(foods.size()) + " foods");
        }
        index = build_index_from_vectors(std::move(foods), std::move(vf.matrix), vf.dim);
      } else {
        index = build_index(std::move(foods), engine_config(g).scheme, bi_dim);
      }
      persist(index, bi_out);
      std::cout << "indexed " << index.size() << " foods (dim " << index.dim() << ", " << index.scheme_id()
                << ") into " << bi_out << '\n';
      return 0;
    }

    if (*score) {
      const auto cfg = engine_config(g);
      const auto standards = standards_for(cfg);
      const auto users = load_persons(sc_persons).users;
      json out = json::array();
      for (const auto& u : users) {
        if (sc_seqn && u.seqn != *sc_seqn) continue;
        out.push_back({{"seqn", u.seqn}, {"hei", hei_to_json(score_user(u, standards), standards)}});
      }
      if (sc_seqn && out.empty()) throw ArgumentError("no user with seqn " + std::to_string(*sc_seqn));
      write_text(sc_out, out.dump(2) + "\n");
      return 0;
    }

    if (*recommend) {
      auto svc = offline_service(g, rc_persons, rc_index);
      return emit(svc->recommend(rc_seqn, rc_k));
    }

    if (*whatif) {
      if (!wi_seqn && wi_intake.empty()) throw ArgumentError("whatif needs --seqn or --intake");
      if (wi_seqn && wi_persons.empty()) throw ArgumentError("--seqn needs --persons");
      auto cfg = engine_config(g);
      auto standards = standards_for(cfg);
      std::vector<UserRecord> users;
      if (!wi_persons.empty()) users = load_persons(wi_persons).users;
      Service svc(load_index(wi_index), std::move(users), std::move(cfg), std::move(standards));
      json req = {{"food_code", wi_food}, {"portion", wi_portion}, {"mode", wi_mode}};
      if (wi_seqn) req["seqn"] = *wi_seqn;
      if (!wi_intake.empty()) req["intake"] = read_json_file(wi_intake);
      if (wi_base) req["swap_base"] = *wi_base;
      return emit(svc.whatif(req));
    }

    if (*simulate) {
      const auto cfg = engine_config(g);
      const auto index = load_index(sim_index);
      const RecommendationEngine engine(index, cfg, standards_for(cfg));
      const auto report = run_evaluation(load_persons(sim_persons).users, engine, g.seed);
      write_text(sim_out, report.to_json().dump(2) + "\n");
      std::cout << report.summary_table();
      return 0;
    }

    if (*gen) {
      if (gen_persons.empty() && gen_foods.empty()) throw ArgumentError("nothing to write");
      if (!gen_persons.empty()) {
        std::ofstream out(gen_persons);
        if (!out) throw ArgumentError("cannot write " + gen_persons);
        write_person_rows(out, gen_synthetic_population(g.seed, gen_n));
      }
      if (!gen_foods.empty()) {
        std::ofstream out(gen_foods);
        if (!out) throw ArgumentError("cannot write " + gen_foods);
        write_food_rows(out, gen_synthetic_foods(g.seed, gen_foods_n));
      }
      return 0;
    }

    if (*serve) {
      ServiceConfig sc = sv;
      if (!sv_file.empty()) {
        sc = ServiceConfig::load(sv_file);
        // Explicit flags win over the file.
        if (!sv.persons_path.empty()) sc.persons_path = sv.persons_path;
        if (!sv.index_dir.empty()) sc.index_dir = sv.index_dir;
        if (serve->count("--host")) sc.host = sv.host;
        if (serve->count("--port")) sc.port = sv.port;
        if (sv.store_path) sc.store_path = sv.store_path;
        if (sv.static_dir) sc.static_dir = sv.static_dir;
        if (sv.llm_enabled) sc.llm_enabled = true;
      }
      if (!g.config_path.empty()) sc.config_path = g.config_path;
      auto svc = Service::load(sc);
      HttpGateway gw(*svc, sc.static_dir);
      const int port = gw.bind(sc.host, sc.port);
      g_gateway = &gw;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << svc->user_count() << " users and " << svc->index().size() << " foods on "
                << sc.host << ":" << port << '\n';
      gw.listen();
      g_gateway = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
