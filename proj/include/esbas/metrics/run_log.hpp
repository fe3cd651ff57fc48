#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "esbas/core/errors.hpp"

namespace esbas {

struct EpisodeRecord {
  std::int64_t meta_time = 0;
  int epoch = 0;
  std::size_t algo = 0;
  double ret = 0.0;        // discounted return of the episode
  double objective = 0.0;  // auxiliary objective (steps-to-goal in the gridworld)
  std::int64_t length = 0;
  bool invalid_action = false;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Which per-episode quantity the meta-algorithm maximises and regrets measure.
enum class ScoreKind { kReturn, kNegObjective };

/// Everything one run of one meta-algorithm produced, one record per episode.
struct RunLog {
  static constexpr const char* kSchema = "esbas-runlog/1";

  std::string meta;  // esbas | ssbas | round-robin | canonical:<id>
  std::string role = "target";  // target | baseline (within one experiment)
  std::vector<std::string> algorithms;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  ScoreKind score_kind = ScoreKind::kReturn;
  bool valid = true;
  std::string error;
  std::vector<EpisodeRecord> episodes;
  // Greedy evaluation of every frozen policy at each epoch start; empty when
  // evaluation was not requested.
  std::vector<std::vector<double>> epoch_values;

  double score(const EpisodeRecord& r) const {
    return score_kind == ScoreKind::kReturn ? r.ret : -r.objective;
  }

  int epochs() const { return episodes.empty() ? 0 : episodes.back().epoch + 1; }

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

nlohmann::json to_json_value(const RunLog& log);
// Throws DataError on a foreign schema or ragged columns.
RunLog run_log_from_json(const nlohmann::json& j);
void write_run_log(const RunLog& log, const std::string& path);
RunLog read_run_log(const std::string& path);

}  // namespace esbas
