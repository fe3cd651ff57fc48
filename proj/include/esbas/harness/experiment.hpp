#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "esbas/algorithms/params_io.hpp"
#include "esbas/harness/config.hpp"
#include "esbas/meta/runner.hpp"
#include "esbas/metrics/regret.hpp"
#include "esbas/metrics/run_log.hpp"

namespace esbas {

namespace fs = std::filesystem;

inline constexpr std::string_view kTargetDir = "target";

std::string baseline_dir(const std::string& algo_id);

std::string run_file_name(std::uint64_t run);

// The canonical baseline of arm k, run in the target's mode and schedule.
MetaSpec baseline_spec(const ExperimentConfig& cfg, std::size_t k);

struct ReportFiles {
  std::string report_json;
  std::string performance_csv;
  std::string ratios_csv;
};

namespace detail {

inline std::string csv_number(double v) { return params_io::format_double(v); }

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detail

/// Report JSON and per-epoch CSV curves, as text. A pure function of the
/// summaries, shared by `run` and `report`.
ReportFiles render_report(const RegretReport& rep);

void write_report_files(const fs::path& dir, const ReportFiles& files);

// Text summary: absolute regret and relative regret with the best
// and worst canonical meta-algorithms.
std::string summary_table(const RegretReport& rep);

struct ExperimentOutcome {
  std::optional<RegretReport> report;
  std::size_t invalid_logs = 0;
  std::vector<std::string> errors;

  bool complete() const { return report && report->valid && errors.empty(); }
};

/// Runs `cfg.runs` paired runs of the target meta-algorithm and of the
/// canonical meta-algorithm of every portfolio member, then writes
///   out/config.ini                 resolved settings
///   out/logs/target/run_NNNN.json  one RunLog per run
///   out/logs/baseline-<id>/...     canonical baselines
///   out/episodes.csv               target episodes
///   out/performance.csv, ratios.csv, report.json
/// Run i of every meta-algorithm uses RunSeeds{seed, i}. Each worker owns the
/// files of the runs it executes; aggregation happens after the join.
template <class Env>
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const LearnerPortfolio<Env>& portfolio,
                                 const Env& env, const fs::path& out, unsigned workers = 1) {
  const std::size_t K = portfolio.size();
  const std::size_t runs = cfg.runs;
  const fs::path logs = out / "logs";
  fs::create_directories(logs / kTargetDir);
  for (const auto& a : cfg.algorithms) fs::create_directories(logs / baseline_dir(a.id));
  detail::write_text(out / "config.ini", resolved_ini(cfg));

  std::vector<RunSummary> meta(runs);
  std::vector<std::vector<RunSummary>> canonical(K, std::vector<RunSummary>(runs));
  ExperimentOutcome outcome;
  std::mutex outcome_mutex;
  std::atomic<std::size_t> next{0};

  auto execute = [&](const MetaSpec& spec, std::size_t i, const char* role, const fs::path& dir) {
    auto log = run_meta(portfolio, env, spec, cfg.episodes, RunSeeds{cfg.seed, i});
    log.role = role;
    write_run_log(log, (dir / run_file_name(i)).string());
    if (!log.valid) {
      std::lock_guard lock(outcome_mutex);
      ++outcome.invalid_logs;
      outcome.errors.push_back(log.meta + " run " + std::to_string(i) + ": " + log.error);
    }
    return summarize(log, cfg.tail_fraction);
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        meta[i] = execute(cfg.meta, i, "target", logs / kTargetDir);
        for (std::size_t k = 0; k < K; ++k) {
          canonical[k][i] = execute(baseline_spec(cfg, k), i, "baseline", logs / baseline_dir(cfg.algorithms[k].id));
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(outcome_mutex);
        outcome.errors.push_back("run " + std::to_string(i) + ": " + e.what());
        meta[i].valid = false;
      }
    }
  };

  const unsigned pool = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(runs)));
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < pool; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  std::sort(outcome.errors.begin(), outcome.errors.end());

  std::ofstream episodes(out / "episodes.csv", std::ios::binary);
  episodes << "run,tau,epoch,algo,return,objective,length\n";
  for (std::size_t i = 0; i < runs; ++i) {
    const auto path = logs / kTargetDir / run_file_name(i);
    if (!fs::exists(path)) continue;
    const auto log = read_run_log(path.string());
    for (const auto& r : log.episodes) {
      episodes << i << ',' << r.meta_time << ',' << r.epoch << ',' << log.algorithms[r.algo] << ','
               << detail::csv_number(r.ret) << ',' << detail::csv_number(r.objective) << ',' << r.length << '\n';
    }
  }
  episodes.close();

  try {
    outcome.report = build_regret_report(std::span<const RunSummary>(meta),
                                         std::span<const std::vector<RunSummary>>(canonical));
    write_report_files(out, render_report(*outcome.report));
  } catch (const std::exception& e) {
    outcome.errors.push_back(std::string("report: ") + e.what());
  }
  if (!outcome.complete()) {
    std::string text = "experiment incomplete\n";
    for (const auto& e : outcome.errors) text += e + "\n";
    detail::write_text(out / "INCOMPLETE", text);
  }
  return outcome;
}

/// Everything `report` needs from a log directory.
struct LogCollection {
  std::vector<RunSummary> target;
  std::vector<std::vector<RunSummary>> canonical;  // [algo][run]
};

/// Reads every RunLog under `dir` (recursively). The logs must share one
/// fingerprint and one portfolio, hold one target log per run and one
/// baseline log per run and algorithm. Throws ConfigError on mixed, empty or
/// incomplete input.
LogCollection collect_logs(const fs::path& dir, double tail_fraction = 0.1);

RegretReport report_from_logs(const fs::path& dir, double tail_fraction = 0.1);

}  // namespace esbas
