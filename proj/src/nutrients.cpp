#include "heirag/nutrients.hpp"

#include <algorithm>
#include <cmath>

#include "heirag/csv.hpp"
#include "heirag/error.hpp"

namespace heirag {

namespace {

struct Subgroup {
  double IntakeProfile::*part;
  double IntakeProfile::*whole;
  std::string_view label;
};

constexpr std::array<Subgroup, 3> kSubgroups{{
    {&IntakeProfile::f_wholefruit_cup, &IntakeProfile::f_totfruit_cup,
     "f_wholefruit_cup exceeds f_totfruit_cup"},
    {&IntakeProfile::f_greensbeans_cup, &IntakeProfile::f_totveg_cup,
     "f_greensbeans_cup exceeds f_totveg_cup"},
    {&IntakeProfile::f_seaplant_oz, &IntakeProfile::f_totprotein_oz,
     "f_seaplant_oz exceeds f_totprotein_oz"},
}};

// Relative slack for subgroup checks; source tables round independently.
constexpr double kHierarchySlack = 1e-9;

}  // namespace

std::string intake_violation(const IntakeProfile& x) {
  for (const auto& f : kIntakeFields) {
    const double v = x.*f.member;
    if (!std::isfinite(v)) return std::string(f.name) + " is not finite";
    if (v < 0) return std::string(f.name) + " is negative";
  }
  for (const auto& g : kSubgroups) {
    const double part = x.*g.part;
    const double whole = x.*g.whole;
    if (part > whole + kHierarchySlack * std::max(1.0, whole)) return std::string(g.label);
  }
  return {};
}

void validate_intake(const IntakeProfile& x) {
  if (auto msg = intake_violation(x); !msg.empty()) throw ArgumentError(msg);
}

IntakeProfile clamp_hierarchy(IntakeProfile x) {
  for (const auto& g : kSubgroups) {
    x.*g.part = std::min(x.*g.part, x.*g.whole);
  }
  return x;
}

IntakeProfile mean_profile(std::span<const IntakeProfile> days) {
  if (days.empty()) throw ArgumentError("mean_profile: no days");
  IntakeProfile out;
  for (const auto& f : kIntakeFields) {
    double sum = 0;
    for (const auto& d : days) sum += d.*f.member;
    out.*f.member = sum / static_cast<double>(days.size());
  }
  return out;
}

std::vector<std::string> split_tags(std::string_view text) {
  std::vector<std::string> tags;
  while (!text.empty()) {
    const auto pos = text.find(';');
    const auto tok = csv::trim(text.substr(0, pos));
    if (!tok.empty()) tags.emplace_back(tok);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  return tags;
}

std::string join_tags(std::span<const std::string> tags) {
  std::string out;
  for (const auto& t : tags) {
    if (!out.empty()) out.push_back(';');
    out += t;
  }
  return out;
}

}  // namespace heirag
