#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heirag/nutrients.hpp"

namespace heirag {

enum class Sex { Male, Female };

std::string_view to_string(Sex s);
std::optional<Sex> parse_sex(std::string_view text);

/// One 24-hour recall day for one respondent.
struct PersonDayRecord {
  Seqn seqn = 0;
  int day = 1;
  IntakeProfile intake;
  /// Columns not in the schema, kept as (name, raw value) in header order.
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Demographic, anthropometric and health fields. Any of them may be absent
/// in raw rows; the quality filter removes records with gaps.
struct Demographics {
  std::optional<double> age_years;
  std::optional<Sex> sex;
  std::optional<std::string> race_eth;
  std::optional<std::string> education;
  std::optional<double> income_ratio;
  std::optional<double> bmi;
  std::optional<bool> flag_diabetes;
  std::optional<bool> flag_cvd;
  std::vector<std::string> exclusions;  // food tags the person avoids

  bool operator==(const Demographics&) const = default;
};

struct ProfileRow {
  Seqn seqn = 0;
  Demographics demo;
};

struct UserRecord {
  Seqn seqn = 0;
  Demographics demo;
  /// Day-averaged intake.
  IntakeProfile intake;
  /// The individual recall days behind `intake`, in day order.
  std::vector<IntakeProfile> days;

  bool diabetes() const { return demo.flag_diabetes.value_or(false); }
  bool cvd() const { return demo.flag_cvd.value_or(false); }
};

/// Required columns of persons.csv, in canonical order.
std::span<const std::string_view> person_columns();
/// Required columns of foods.csv, in canonical order.
std::span<const std::string_view> food_columns();

/// Everything read from a persons table: one day record and one raw profile
/// row per data row.
struct PersonTable {
  std::vector<PersonDayRecord> days;
  std::vector<ProfileRow> profiles;
};

/// Parses persons.csv. Throws SchemaError on a missing column and ParseError
/// (with line and column) on a malformed row.
PersonTable parse_person_table(std::istream& in);
std::vector<PersonDayRecord> parse_person_rows(std::istream& in);

struct DropReport {
  std::size_t count = 0;
  std::vector<Seqn> seqns;
};

struct LinkResult {
  std::vector<UserRecord> users;  // ascending seqn
  DropReport dropped;
};

/// Joins day records to profile rows on seqn and averages intake across
/// days. Seqns without a profile row are dropped and reported. When several
/// profile rows share a seqn the first one wins.
LinkResult link_and_average(std::span<const PersonDayRecord> days,
                            std::span<const ProfileRow> profiles);

struct FilterReport {
  /// Excluded record count by reason; reasons are "missing_demographic",
  /// "missing_anthropometric", "missing_health_flags", "no_positive_energy".
  std::map<std::string, std::size_t> excluded;
  std::size_t total_excluded() const;
};

struct FilterResult {
  std::vector<UserRecord> kept;
  std::vector<UserRecord> excluded;
  FilterReport report;
};

/// Returns the first failing completeness rule, or empty when the record
/// passes.
std::string exclusion_reason(const UserRecord& u);

FilterResult apply_quality_filter(std::vector<UserRecord> users);

/// Parses foods.csv. Throws SchemaError on duplicate food_code or missing
/// column, ParseError on bad values.
std::vector<FoodItem> parse_food_rows(std::istream& in);

/// Writes users back as persons.csv rows (one row per recall day).
void write_person_rows(std::ostream& out, std::span<const UserRecord> users);
void write_person_days(std::ostream& out, std::span<const PersonDayRecord> days,
                       std::span<const ProfileRow> profiles);
void write_food_rows(std::ostream& out, std::span<const FoodItem> foods);

/// Convenience: parse, link and filter a persons file.
struct LoadedPersons {
  std::vector<UserRecord> users;
  DropReport dropped;
  FilterReport filtered;
};
LoadedPersons load_persons(const std::string& path);
std::vector<FoodItem> load_foods(const std::string& path);

// Synthetic data ------------------------------------------------------------

/// Deterministic population with two recall days per person. Energy is
/// log-normal around 2000 kcal, component densities follow a latent diet
/// quality so baseline totals spread across roughly 20 to 80.
/// Throws ArgumentError when n == 0.
std::vector<UserRecord> gen_synthetic_population(std::uint64_t seed, std::size_t n);

/// Deterministic food corpus built from a table of common foods; items past
/// the first pass through the table are perturbed variants.
std::vector<FoodItem> gen_synthetic_foods(std::uint64_t seed, std::size_t n);

}  // namespace heirag
