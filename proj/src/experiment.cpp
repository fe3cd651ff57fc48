#include "esbas/harness/experiment.hpp"

namespace esbas {

std::string baseline_dir(const std::string& algo_id) { return "baseline-" + algo_id; }

std::string run_file_name(std::uint64_t run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%04llu.json", static_cast<unsigned long long>(run));
  return buf;
}

MetaSpec baseline_spec(const ExperimentConfig& cfg, std::size_t k) {
  MetaSpec spec = cfg.meta;
  spec.kind = MetaKind::kCanonical;
  spec.arm = k;
  spec.sliding = cfg.meta.is_sliding();
  spec.options.evaluation_rollouts = 0;
  return spec;
}

ReportFiles render_report(const RegretReport& rep) {
  ReportFiles files;
  files.report_json = to_json_value(rep).dump(2) + "\n";

  std::string perf = "epoch,algo_or_meta,mean_return,ci95\n";
  for (std::size_t b = 0; b < rep.performance_meta.size(); ++b) {
    const auto& m = rep.performance_meta[b];
    perf += std::to_string(b) + "," + rep.meta + "," + detail::csv_number(m.mean) + "," +
            detail::csv_number(m.ci95) + "\n";
    for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
      if (b >= rep.performance_canonical[k].size()) continue;
      const auto& c = rep.performance_canonical[k][b];
      perf += std::to_string(b) + "," + rep.algorithms[k] + "," + detail::csv_number(c.mean) + "," +
              detail::csv_number(c.ci95) + "\n";
    }
  }
  files.performance_csv = std::move(perf);

  std::string ratios = "epoch,algo,fraction,ci95\n";
  for (std::size_t b = 0; b < rep.ratios.size(); ++b) {
    for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
      const auto& r = rep.ratios[b][k];
      ratios += std::to_string(b) + "," + rep.algorithms[k] + "," + detail::csv_number(r.mean) + "," +
                detail::csv_number(r.ci95) + "\n";
    }
  }
  files.ratios_csv = std::move(ratios);
  return files;
}

void write_report_files(const fs::path& dir, const ReportFiles& files) {
  detail::write_text(dir / "report.json", files.report_json);
  detail::write_text(dir / "performance.csv", files.performance_csv);
  detail::write_text(dir / "ratios.csv", files.ratios_csv);
}

std::string summary_table(const RegretReport& rep) {
  auto cell = [](const MeanCi& m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f +- %.2f", m.mean, m.ci95);
    return std::string(buf);
  };
  char line[512];
  std::string out;
  std::snprintf(line, sizeof line, "%-14s %6s %9s  %-22s %-32s %-32s\n", "meta", "runs", "T", "absolute",
                "w. best", "w. worst");
  out += line;
  const std::string best = cell(rep.relative_best) + " (" + rep.algorithms[rep.best_algorithm] + ")";
  const std::string worst = cell(rep.relative_worst) + " (" + rep.algorithms[rep.worst_algorithm] + ")";
  std::snprintf(line, sizeof line, "%-14s %6zu %9lld  %-22s %-32s %-32s\n", rep.meta.c_str(), rep.valid_runs,
                static_cast<long long>(rep.horizon), cell(rep.absolute_meta).c_str(), best.c_str(), worst.c_str());
  out += line;
  return out;
}

LogCollection collect_logs(const fs::path& dir, double tail_fraction) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("run_") && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw ConfigError("no run logs under " + dir.string());
  std::sort(files.begin(), files.end());

  std::optional<std::string> fingerprint;
  std::vector<std::string> algorithms;
  std::map<std::uint64_t, RunSummary> target;
  std::vector<std::map<std::uint64_t, RunSummary>> canonical;
  for (const auto& path : files) {
    const auto log = read_run_log(path.string());
    if (!fingerprint) {
      fingerprint = log.fingerprint;
      algorithms = log.algorithms;
      canonical.resize(algorithms.size());
    }
    if (log.fingerprint != *fingerprint) {
      throw ConfigError("mixed config fingerprints: " + *fingerprint + " and " + log.fingerprint + " (" +
                        path.string() + ")");
    }
    if (log.algorithms != algorithms) throw ConfigError("mixed portfolios in " + dir.string());
    auto summary = summarize(log, tail_fraction);
    std::map<std::uint64_t, RunSummary>* slot = &target;
    if (log.role == "baseline") {
      const std::string prefix = "canonical:";
      if (!log.meta.starts_with(prefix)) throw ConfigError("baseline log is not canonical: " + path.string());
      const auto id = log.meta.substr(prefix.size());
      const auto it = std::find(algorithms.begin(), algorithms.end(), id);
      if (it == algorithms.end()) throw ConfigError("baseline for unknown algorithm " + id);
      slot = &canonical[static_cast<std::size_t>(it - algorithms.begin())];
    }
    if (!slot->emplace(log.run, std::move(summary)).second) {
      throw ConfigError("duplicate run " + std::to_string(log.run) + " for " + log.meta);
    }
  }

  LogCollection out;
  for (auto& [run, s] : target) out.target.push_back(std::move(s));
  for (std::size_t k = 0; k < canonical.size(); ++k) {
    auto& runs = out.canonical.emplace_back();
    for (const auto& t : out.target) {
      auto it = canonical[k].find(t.run);
      if (it == canonical[k].end()) {
        throw ConfigError("run " + std::to_string(t.run) + " lacks the baseline of " + algorithms[k]);
      }
      runs.push_back(std::move(it->second));
    }
  }
  if (out.target.empty()) throw ConfigError("no target logs under " + dir.string());
  return out;
}

RegretReport report_from_logs(const fs::path& dir, double tail_fraction) {
  auto logs = collect_logs(dir, tail_fraction);
  return build_regret_report(std::span<const RunSummary>(logs.target),
                             std::span<const std::vector<RunSummary>>(logs.canonical));
}
}  // namespace esbas
