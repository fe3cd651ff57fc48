#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "esbas/core/errors.hpp"
#include "esbas/metrics/run_log.hpp"

namespace esbas {

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 s / sqrt(n)
  std::size_t n = 0;
};

MeanCi mean_ci(std::span<const double> xs);

inline constexpr std::size_t kMinTailLogLength = 10;

// Mean score over the last ceil(tail_fraction * length) episodes of a log.
double tail_mean(const RunLog& log, double tail_fraction);

/// Estimate of the best expected score reachable by the portfolio: for each
/// algorithm, the tail mean of its canonical logs averaged over runs; then
/// the maximum over algorithms.
double estimate_optimal_return(std::span<const std::vector<RunLog>> canonical_logs,
                                      double tail_fraction = 0.1);

// T mu* - sum_{tau <= T} score(tau): Monte-Carlo estimate of the absolute
// pseudo-regret of one run.
double absolute_pseudo_regret(const RunLog& log, double mu_star, std::int64_t T);

struct EpochGaps {
  std::vector<double> gaps;     // best value minus each algorithm's value
  std::optional<double> dagger; // smallest non-zero gap
};

EpochGaps epoch_gaps(std::span<const double> values);

/// sum_tau (max_a v_b(a) - v_b(sigma(tau))) where v_b are the frozen-policy
/// evaluations of the epoch containing tau.
double short_sighted_pseudo_regret(const RunLog& log, std::int64_t T);

// Natural per-episode performance: the return, or the (positive) objective
// for objective-driven environments.
double performance_value(const RunLog& log, const EpisodeRecord& r);

/// Per-run digest holding everything the aggregate report needs, so that
/// experiments never keep more than one full log per worker in memory.
struct RunSummary {
  std::string meta;
  std::vector<std::string> algorithms;
  std::string fingerprint;
  std::uint64_t run = 0;
  bool valid = true;
  std::int64_t length = 0;
  double score_sum = 0.0;
  std::optional<double> tail;                       // tail mean score, logs of >= 10 episodes
  std::vector<double> epoch_performance;            // [epoch]
  std::vector<std::vector<double>> epoch_fractions; // [epoch][algo]
  std::optional<double> short_sighted;
  std::vector<std::vector<double>> epoch_values;
};

RunSummary summarize(const RunLog& log, double tail_fraction = 0.1);

namespace detail {

inline std::size_t epoch_count(std::span<const RunSummary> runs) {
  std::size_t epochs = 0;
  for (const auto& r : runs) epochs = std::max(epochs, r.epoch_performance.size());
  return epochs;
}

}  // namespace detail

/// Fraction of each epoch's episodes controlled by each algorithm, averaged
/// over runs: result[epoch][algo].
std::vector<std::vector<MeanCi>> selection_ratios(std::span<const RunSummary> runs, std::size_t arms);

std::vector<std::vector<MeanCi>> selection_ratios(std::span<const RunLog> logs, std::size_t arms);

/// Mean performance per epoch: each run's epoch mean, averaged over runs.
std::vector<MeanCi> performance_per_epoch(std::span<const RunSummary> runs);

std::vector<MeanCi> performance_per_epoch(std::span<const RunLog> logs);

/// Regret summary of one experiment: the meta-algorithm against the
/// canonical meta-algorithm of every portfolio member, over paired runs.
/// Runs with an invalid log (in any of the paired lists) are left out of
/// the regret figures and flag the report invalid.
struct RegretReport {
  static constexpr const char* kSchema = "esbas-regret-report/1";

  std::string meta;
  std::vector<std::string> algorithms;
  std::string fingerprint;
  std::size_t runs = 0;
  std::size_t valid_runs = 0;
  std::int64_t horizon = 0;
  bool valid = true;
  double optimal_return = 0.0;
  MeanCi absolute_meta;
  std::vector<MeanCi> absolute_canonical;
  std::size_t best_algorithm = 0;   // lowest absolute pseudo-regret
  std::size_t worst_algorithm = 0;  // highest
  MeanCi relative_best;   // abs(meta) - abs(best canonical), paired
  MeanCi relative_worst;  // abs(meta) - abs(worst canonical), paired
  std::optional<MeanCi> short_sighted;
  std::vector<std::vector<MeanCi>> epoch_gaps;      // [epoch][algo], when evaluations exist
  std::vector<std::optional<MeanCi>> epoch_dagger;  // smallest non-zero gap per epoch
  std::vector<std::vector<MeanCi>> ratios;          // [epoch][algo]
  std::vector<MeanCi> performance_meta;             // [epoch]
  std::vector<std::vector<MeanCi>> performance_canonical;  // [algo][epoch]
};

/// `canonical[k]` holds one summary per run for portfolio member k; entry i
/// of every list shares seeds with meta[i].
RegretReport build_regret_report(std::span<const RunSummary> meta,
                                        std::span<const std::vector<RunSummary>> canonical);

RegretReport build_regret_report(std::span<const RunLog> meta_logs,
                                        std::span<const std::vector<RunLog>> canonical,
                                        double tail_fraction = 0.1);

nlohmann::json to_json_value(const MeanCi& m);

nlohmann::json to_json_value(const RegretReport& rep);

}  // namespace esbas
