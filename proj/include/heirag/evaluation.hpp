#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heirag/ingest.hpp"
#include "heirag/pipeline.hpp"

namespace heirag {

struct PopulationSplit {
  std::vector<UserRecord> train;
  std::vector<UserRecord> test;
};

/// Sorts by seqn, shuffles with a seeded Fisher-Yates and puts the first
/// floor(ratio * n) users in train. Throws ArgumentError when n < 2 or the
/// ratio is outside (0, 1).
PopulationSplit split_population(std::vector<UserRecord> users, double ratio, std::uint64_t seed);

struct SimulationResult {
  Seqn seqn = 0;
  double h_base = 0;
  double h_rec = 0;
  double delta = 0;
  Plan plan;
};

/// Baseline is the day-averaged score; the recommended score adds the
/// plan's improvement (computed on the averaged intake) to it.
SimulationResult simulate_user(const UserRecord& user, const RecommendationEngine& engine);

/// Share of scores strictly above tau. Throws ArgumentError when empty.
double proportion_above(std::span<const double> scores, double tau);

/// Linear-interpolation quantiles at position p * (n - 1).
/// Throws ArgumentError when scores is empty or a p is outside [0, 1].
std::vector<double> quantiles(std::span<const double> scores, std::span<const double> probs);
double quantile(std::span<const double> scores, double p);

struct QuantileRow {
  double prob = 0;
  double before = 0;
  double after = 0;
  double delta = 0;  // after - before
};

inline constexpr double kHistogramStep = 5.0;
inline constexpr std::size_t kHistogramBins = 20;

struct EvaluationReport {
  std::size_t n_total = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double mean_delta = 0;
  double sd_delta = 0;  // sample standard deviation
  double tau = 50;
  double p_before = 0;
  double p_after = 0;
  double mean_before = 0;
  double mean_after = 0;
  std::array<QuantileRow, 3> quantiles{};
  std::array<std::size_t, kHistogramBins> hist_before{};
  std::array<std::size_t, kHistogramBins> hist_after{};
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<SimulationResult> results;  // test users, ascending seqn

  nlohmann::json to_json() const;
  /// Quantile table with one row per quartile (25th, 50th, 75th).
  std::string summary_table() const;
};

/// Bin index for a score in [0, 100]; 100 falls in the last bin.
std::size_t histogram_bin(double score);

/// Split, simulate every test user, aggregate.
EvaluationReport run_evaluation(std::vector<UserRecord> users, const RecommendationEngine& engine,
                                std::uint64_t seed);

}  // namespace heirag
