#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "heirag/nutrients.hpp"

namespace heirag {

struct UserRecord;

/// The thirteen HEI-2020 components, in reporting order.
enum class Component : std::uint8_t {
  TotalFruits,
  WholeFruits,
  TotalVegetables,
  GreensAndBeans,
  WholeGrains,
  Dairy,
  TotalProtein,
  SeafoodPlantProteins,
  FattyAcids,
  RefinedGrains,
  Sodium,
  AddedSugars,
  SaturatedFats,
};

inline constexpr std::size_t kComponentCount = 13;

inline constexpr std::array<Component, kComponentCount> kAllComponents{
    Component::TotalFruits,    Component::WholeFruits,          Component::TotalVegetables,
    Component::GreensAndBeans, Component::WholeGrains,          Component::Dairy,
    Component::TotalProtein,   Component::SeafoodPlantProteins, Component::FattyAcids,
    Component::RefinedGrains,  Component::Sodium,               Component::AddedSugars,
    Component::SaturatedFats};

constexpr std::size_t index_of(Component c) { return static_cast<std::size_t>(c); }

/// Stable snake_case identifier, e.g. "whole_grains".
std::string_view component_id(Component c);
/// Display name, e.g. "Whole Grains".
std::string_view component_name(Component c);
/// Accepts either the identifier or the display name.
std::optional<Component> parse_component(std::string_view text);

enum class ScoreKind { Adequacy, Moderation, Ratio };
enum class DensityBasis { Per1000Kcal, PercentEnergy, Ratio };

std::string_view to_string(ScoreKind k);
std::string_view to_string(DensityBasis b);

struct ScoringStandard {
  Component component = Component::TotalFruits;
  ScoreKind kind = ScoreKind::Adequacy;
  double max_points = 5;
  DensityBasis basis = DensityBasis::Per1000Kcal;
  double std_for_max = 0;
  double std_for_min = 0;
};

/// Cut points for all thirteen components.
///
/// Immutable once built. The defaults are the HEI-2020 adult standards; a
/// JSON document keyed by component id may override any subset of entries.
class StandardsTable {
 public:
  /// HEI-2020 adult cut points.
  static const StandardsTable& defaults();

  /// Defaults overridden by the entries of `doc`, then validated.
  /// Throws ConfigError on unknown components or broken invariants.
  static StandardsTable from_json(const nlohmann::json& doc);
  static StandardsTable load(const std::string& path);

  const ScoringStandard& operator[](Component c) const { return entries_[index_of(c)]; }
  std::span<const ScoringStandard, kComponentCount> entries() const { return entries_; }
  double max_total() const;

  nlohmann::json to_json() const;

 private:
  StandardsTable() = default;
  void validate() const;

  std::array<ScoringStandard, kComponentCount> entries_{};
};

/// A density or ratio; empty when the day has zero energy.
using Density = std::optional<double>;
inline constexpr std::nullopt_t kZeroEnergy = std::nullopt;

/// Amount per 1000 kcal. Throws ArgumentError on negative inputs.
Density density(double quantity, double energy_kcal);

/// Points for one component given its density or ratio.
/// Zero-energy values score 0. Throws ArgumentError on negative values.
double score_component(Density value, const ScoringStandard& standard);

struct ComponentScore {
  Density value;  // density, %energy or ratio (may be +inf for the fatty-acid ratio)
  double points = 0;
};

struct HeiScore {
  double total = 0;
  std::array<ComponentScore, kComponentCount> components{};

  const ComponentScore& operator[](Component c) const { return components[index_of(c)]; }
  double points(Component c) const { return components[index_of(c)].points; }
};

/// The component's raw value for an intake (before scoring).
Density component_value(const IntakeProfile& x, Component c);

HeiScore score_hei(const IntakeProfile& x,
                   const StandardsTable& standards = StandardsTable::defaults());

/// Scores each day separately and averages totals and component points.
/// Throws ArgumentError when `days` is empty.
HeiScore score_days(std::span<const IntakeProfile> days,
                    const StandardsTable& standards = StandardsTable::defaults());

/// Day-level scoring averaged across the user's recall days; falls back to
/// the averaged intake for records that carry no day list.
HeiScore score_user(const UserRecord& u,
                    const StandardsTable& standards = StandardsTable::defaults());

/// after.points - before.points per component.
std::array<double, kComponentCount> component_deltas(const HeiScore& before, const HeiScore& after);

}  // namespace heirag
