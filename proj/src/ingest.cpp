#include "heirag/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "heirag/csv.hpp"
#include "heirag/error.hpp"

namespace heirag {

namespace {

constexpr std::array<std::string_view, 31> kPersonColumns{
    "seqn",           "day",           "age_years",        "sex",
    "race_eth",       "education",     "income_ratio",     "bmi",
    "flag_diabetes",  "flag_cvd",      "exclusions",       "energy_kcal",
    "protein_g",      "carb_g",        "fat_g",            "fiber_g",
    "sodium_mg",      "potassium_mg",  "sfa_g",            "mufa_g",
    "pufa_g",         "added_sugars_g", "f_totfruit_cup",  "f_wholefruit_cup",
    "f_totveg_cup",   "f_greensbeans_cup", "f_wholegrain_oz", "f_dairy_cup",
    "f_totprotein_oz", "f_seaplant_oz", "f_refinedgrain_oz"};

constexpr std::array<std::string_view, 20> kFoodColumns{
    "food_code",        "description",     "serving_desc",      "tags",
    "energy_kcal",      "sodium_mg",       "added_sugars_g",    "sfa_g",
    "mufa_g",           "pufa_g",          "fiber_g",           "f_totfruit_cup",
    "f_wholefruit_cup", "f_totveg_cup",    "f_greensbeans_cup", "f_wholegrain_oz",
    "f_dairy_cup",      "f_totprotein_oz", "f_seaplant_oz",     "f_refinedgrain_oz"};

// Food columns that may be present but are not required.
constexpr std::array<std::string_view, 4> kOptionalFoodColumns{"protein_g", "carb_g", "fat_g",
                                                               "potassium_mg"};

constexpr std::string_view kSugarTspColumn = "added_sugars_tsp";

bool is_missing(std::string_view v) {
  v = csv::trim(v);
  return v.empty() || v == "unknown" || v == "NA" || v == "na" || v == ".";
}

double parse_quantity(std::string_view raw, std::size_t line, std::string_view column) {
  auto v = csv::parse_number(raw);
  if (!v) throw ParseError(line, std::string(column), "non-numeric value '" + std::string(raw) + "'");
  if (!std::isfinite(*v)) throw ParseError(line, std::string(column), "non-finite value");
  if (*v < 0) throw ParseError(line, std::string(column), "negative value");
  return *v;
}

std::optional<double> parse_optional_number(std::string_view raw, std::size_t line,
                                            std::string_view column) {
  if (is_missing(raw)) return std::nullopt;
  return parse_quantity(raw, line, column);
}

std::optional<bool> parse_flag(std::string_view raw, std::size_t line, std::string_view column) {
  raw = csv::trim(raw);
  if (is_missing(raw)) return std::nullopt;
  if (raw == "1" || raw == "true" || raw == "yes") return true;
  if (raw == "0" || raw == "false" || raw == "no") return false;
  throw ParseError(line, std::string(column), "invalid flag '" + std::string(raw) + "'");
}

std::optional<std::string> parse_category(std::string_view raw) {
  if (is_missing(raw)) return std::nullopt;
  return std::string(csv::trim(raw));
}

Seqn parse_positive_id(std::string_view raw, std::size_t line, std::string_view column) {
  auto v = csv::parse_integer(raw);
  if (!v || *v <= 0) {
    throw ParseError(line, std::string(column), "expected positive integer, got '" + std::string(raw) + "'");
  }
  return *v;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : std::string();
}

std::string format_flag(const std::optional<bool>& v) {
  if (!v) return {};
  return *v ? "1" : "0";
}

}  // namespace

std::string_view to_string(Sex s) { return s == Sex::Male ? "male" : "female"; }

std::optional<Sex> parse_sex(std::string_view text) {
  text = csv::trim(text);
  if (text == "male" || text == "Male" || text == "M" || text == "m" || text == "1") return Sex::Male;
  if (text == "female" || text == "Female" || text == "F" || text == "f" || text == "2") {
    return Sex::Female;
  }
  return std::nullopt;
}

std::span<const std::string_view> person_columns() { return kPersonColumns; }
std::span<const std::string_view> food_columns() { return kFoodColumns; }

PersonTable parse_person_table(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw SchemaError("persons table is empty (no header)");
  const csv::Header header(std::move(row));

  const bool sugar_from_tsp = !header.find("added_sugars_g") && header.find(kSugarTspColumn);
  std::vector<std::size_t> pos;
  for (auto name : kPersonColumns) {
    if (name == "added_sugars_g" && sugar_from_tsp) {
      pos.push_back(*header.find(kSugarTspColumn));
    } else {
      pos.push_back(header.require(name));
    }
  }
  std::vector<bool> known(header.size(), false);
  for (auto p : pos) known[p] = true;

  auto col = [&](std::string_view name) {
    const auto it = std::find(kPersonColumns.begin(), kPersonColumns.end(), name);
    return pos[static_cast<std::size_t>(it - kPersonColumns.begin())];
  };

  PersonTable table;
  while (reader.next(row)) {
    const std::size_t line = reader.line();
    if (row.size() != header.size()) {
      throw ParseError(line, "", "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(row.size()));
    }
    PersonDayRecord rec;
    rec.seqn = parse_positive_id(row[col("seqn")], line, "seqn");
    auto day = csv::parse_integer(row[col("day")]);
    if (!day || (*day != 1 && *day != 2)) {
      throw ParseError(line, "day", "recall day must be 1 or 2, got '" + row[col("day")] + "'");
    }
    rec.day = static_cast<int>(*day);
    for (const auto& f : kIntakeFields) {
      const std::string_view column =
          (f.name == "added_sugars_g" && sugar_from_tsp) ? kSugarTspColumn : f.name;
      double v = parse_quantity(row[col(f.name)], line, column);
      if (f.name == "added_sugars_g" && sugar_from_tsp) v *= kGramsPerTspSugar;
      rec.intake.*f.member = v;
    }
    if (auto msg = intake_violation(rec.intake); !msg.empty()) throw ParseError(line, "", msg);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!known[i]) rec.extra.emplace_back(header.names()[i], row[i]);
    }

    ProfileRow prof;
    prof.seqn = rec.seqn;
    auto& d = prof.demo;
    d.age_years = parse_optional_number(row[col("age_years")], line, "age_years");
    if (d.age_years && *d.age_years > 130) throw ParseError(line, "age_years", "age out of range");
    if (!is_missing(row[col("sex")])) {
      d.sex = parse_sex(row[col("sex")]);
      if (!d.sex) throw ParseError(line, "sex", "invalid sex '" + row[col("sex")] + "'");
    }
    d.race_eth = parse_category(row[col("race_eth")]);
    d.education = parse_category(row[col("education")]);
    d.income_ratio = parse_optional_number(row[col("income_ratio")], line, "income_ratio");
    d.bmi = parse_optional_number(row[col("bmi")], line, "bmi");
    d.flag_diabetes = parse_flag(row[col("flag_diabetes")], line, "flag_diabetes");
    d.flag_cvd = parse_flag(row[col("flag_cvd")], line, "flag_cvd");
    d.exclusions = split_tags(row[col("exclusions")]);

    table.days.push_back(std::move(rec));
    table.profiles.push_back(std::move(prof));
  }
  return table;
}

std::vector<PersonDayRecord> parse_person_rows(std::istream& in) {
  return parse_person_table(in).days;
}

LinkResult link_and_average(std::span<const PersonDayRecord> days,
                            std::span<const ProfileRow> profiles) {
  std::unordered_map<Seqn, const Demographics*> by_seqn;
  for (const auto& p : profiles) by_seqn.try_emplace(p.seqn, &p.demo);

  std::map<Seqn, std::vector<const PersonDayRecord*>> grouped;
  for (const auto& d : days) grouped[d.seqn].push_back(&d);

  LinkResult out;
  for (auto& [seqn, recs] : grouped) {
    auto it = by_seqn.find(seqn);
    if (it == by_seqn.end()) {
      ++out.dropped.count;
      out.dropped.seqns.push_back(seqn);
      continue;
    }
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto* a, const auto* b) { return a->day < b->day; });
    for (std::size_t i = 1; i < recs.size(); ++i) {
      if (recs[i]->day == recs[i - 1]->day) {
        throw SchemaError("duplicate recall day " + std::to_string(recs[i]->day) + " for seqn " +
                          std::to_string(seqn));
      }
    }
    UserRecord u;
    u.seqn = seqn;
    u.demo = *it->second;
    for (const auto* r : recs) u.days.push_back(r->intake);
    u.intake = mean_profile(u.days);
    out.users.push_back(std::move(u));
  }
  return out;
}

std::size_t FilterReport::total_excluded() const {
  std::size_t n = 0;
  for (const auto& [_, c] : excluded) n += c;
  return n;
}

std::string exclusion_reason(const UserRecord& u) {
  const auto& d = u.demo;
  if (!d.age_years || !d.sex || !d.race_eth || !d.education || !d.income_ratio) {
    return "missing_demographic";
  }
  if (!d.bmi || !(*d.bmi > 0) || !std::isfinite(*d.bmi)) return "missing_anthropometric";
  if (!d.flag_diabetes || !d.flag_cvd) return "missing_health_flags";
  const bool any_energy =
      std::any_of(u.days.begin(), u.days.end(), [](const auto& x) { return x.energy_kcal > 0; }) ||
      (u.days.empty() && u.intake.energy_kcal > 0);
  if (!any_energy) return "no_positive_energy";
  return {};
}

FilterResult apply_quality_filter(std::vector<UserRecord> users) {
  FilterResult out;
  for (auto& u : users) {
    auto reason = exclusion_reason(u);
    if (reason.empty()) {
      out.kept.push_back(std::move(u));
    } else {
      ++out.report.excluded[reason];
      out.excluded.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<FoodItem> parse_food_rows(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw SchemaError("foods table is empty (no header)");
  const csv::Header header(std::move(row));
  for (auto name : kFoodColumns) header.require(name);

  std::vector<FoodItem> foods;
  std::set<FoodCode> seen;
  while (reader.next(row)) {
    const std::size_t line = reader.line();
    if (row.size() != header.size()) {
      throw ParseError(line, "", "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(row.size()));
    }
    FoodItem item;
    item.food_code = parse_positive_id(row[*header.find("food_code")], line, "food_code");
    if (!seen.insert(item.food_code).second) {
      throw SchemaError("duplicate food_code " + std::to_string(item.food_code));
    }
    item.description = std::string(csv::trim(row[*header.find("description")]));
    item.serving_desc = std::string(csv::trim(row[*header.find("serving_desc")]));
    item.tags = split_tags(row[*header.find("tags")]);
    for (const auto& f : kIntakeFields) {
      const auto p = header.find(f.name);
      if (!p) continue;  // optional nutrient columns
      item.amounts.*f.member = parse_quantity(row[*p], line, f.name);
    }
    if (auto msg = intake_violation(item.amounts); !msg.empty()) throw ParseError(line, "", msg);
    foods.push_back(std::move(item));
  }
  return foods;
}

namespace {

void write_day_row(std::ostream& out, Seqn seqn, int day, const Demographics& d,
                   const IntakeProfile& x) {
  out << seqn << ',' << day << ',' << format_optional(d.age_years) << ','
      << (d.sex ? std::string(to_string(*d.sex)) : std::string()) << ','
      << csv::escape(d.race_eth.value_or("")) << ',' << csv::escape(d.education.value_or(""))
      << ',' << format_optional(d.income_ratio) << ',' << format_optional(d.bmi) << ','
      << format_flag(d.flag_diabetes) << ',' << format_flag(d.flag_cvd) << ','
      << csv::escape(join_tags(d.exclusions));
  for (const auto& f : kIntakeFields) out << ',' << csv::format_number(x.*f.member);
  out << '\n';
}

void write_person_header(std::ostream& out) {
  for (std::size_t i = 0; i < kPersonColumns.size(); ++i) {
    out << (i ? "," : "") << kPersonColumns[i];
  }
  out << '\n';
}

}  // namespace

void write_person_rows(std::ostream& out, std::span<const UserRecord> users) {
  write_person_header(out);
  for (const auto& u : users) {
    if (u.days.empty()) {
      write_day_row(out, u.seqn, 1, u.demo, u.intake);
    } else {
      for (std::size_t d = 0; d < u.days.size(); ++d) {
        write_day_row(out, u.seqn, static_cast<int>(d + 1), u.demo, u.days[d]);
      }
    }
  }
}

void write_person_days(std::ostream& out, std::span<const PersonDayRecord> days,
                       std::span<const ProfileRow> profiles) {
  if (days.size() != profiles.size()) throw ArgumentError("days and profiles must align");
  write_person_header(out);
  for (std::size_t i = 0; i < days.size(); ++i) {
    write_day_row(out, days[i].seqn, days[i].day, profiles[i].demo, days[i].intake);
  }
}

void write_food_rows(std::ostream& out, std::span<const FoodItem> foods) {
  for (std::size_t i = 0; i < kFoodColumns.size(); ++i) out << (i ? "," : "") << kFoodColumns[i];
  for (auto c : kOptionalFoodColumns) out << ',' << c;
  out << '\n';
  for (const auto& f : foods) {
    out << f.food_code << ',' << csv::escape(f.description) << ',' << csv::escape(f.serving_desc)
        << ',' << csv::escape(join_tags(f.tags));
    for (std::size_t i = 4; i < kFoodColumns.size(); ++i) {
      for (const auto& field : kIntakeFields) {
        if (field.name == kFoodColumns[i]) out << ',' << csv::format_number(f.amounts.*field.member);
      }
    }
    for (auto c : kOptionalFoodColumns) {
      for (const auto& field : kIntakeFields) {
        if (field.name == c) out << ',' << csv::format_number(f.amounts.*field.member);
      }
    }
    out << '\n';
  }
}

LoadedPersons load_persons(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open persons file: " + path);
  auto table = parse_person_table(in);
  auto linked = link_and_average(table.days, table.profiles);
  auto filtered = apply_quality_filter(std::move(linked.users));
  return {std::move(filtered.kept), std::move(linked.dropped), std::move(filtered.report)};
}

std::vector<FoodItem> load_foods(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open foods file: " + path);
  return parse_food_rows(in);
}

}  // namespace heirag
