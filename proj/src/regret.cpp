#include "esbas/metrics/regret.hpp"

namespace esbas {

MeanCi mean_ci(std::span<const double> xs) {
  MeanCi out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

double tail_mean(const RunLog& log, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail fraction must lie in (0, 1]");
  if (log.episodes.size() < kMinTailLogLength) {
    throw DataError("log " + log.meta + " is shorter than " + std::to_string(kMinTailLogLength) + " episodes");
  }
  const auto n = log.episodes.size();
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) sum += log.score(log.episodes[i]);
  return sum / static_cast<double>(tail);
}

double estimate_optimal_return(std::span<const std::vector<RunLog>> canonical_logs,
                                      double tail_fraction) {
  if (canonical_logs.empty()) throw DataError("need canonical logs to estimate the optimal return");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& runs : canonical_logs) {
    if (runs.empty()) throw DataError("every algorithm needs at least one canonical log");
    double sum = 0.0;
    for (const auto& log : runs) sum += tail_mean(log, tail_fraction);
    best = std::max(best, sum / static_cast<double>(runs.size()));
  }
  return best;
}

double absolute_pseudo_regret(const RunLog& log, double mu_star, std::int64_t T) {
  if (T < 0 || static_cast<std::size_t>(T) > log.episodes.size()) {
    throw DataError("T exceeds the log length");
  }
  double collected = 0.0;
  for (std::int64_t i = 0; i < T; ++i) collected += log.score(log.episodes[static_cast<std::size_t>(i)]);
  return static_cast<double>(T) * mu_star - collected;
}

EpochGaps epoch_gaps(std::span<const double> values) {
  EpochGaps out;
  if (values.empty()) return out;
  const double best = *std::max_element(values.begin(), values.end());
  for (double v : values) {
    const double gap = best - v;
    out.gaps.push_back(gap);
    if (gap > 0.0 && (!out.dagger || gap < *out.dagger)) out.dagger = gap;
  }
  return out;
}

double short_sighted_pseudo_regret(const RunLog& log, std::int64_t T) {
  if (T < 0 || static_cast<std::size_t>(T) > log.episodes.size()) {
    throw DataError("T exceeds the log length");
  }
  double regret = 0.0;
  for (std::int64_t i = 0; i < T; ++i) {
    const auto& r = log.episodes[static_cast<std::size_t>(i)];
    if (r.epoch < 0 || static_cast<std::size_t>(r.epoch) >= log.epoch_values.size()) {
      throw DataError("missing frozen-policy evaluation for epoch " + std::to_string(r.epoch));
    }
    const auto& values = log.epoch_values[static_cast<std::size_t>(r.epoch)];
    if (r.algo >= values.size()) throw DataError("evaluation table lacks algorithm " + std::to_string(r.algo));
    regret += *std::max_element(values.begin(), values.end()) - values[r.algo];
  }
  return regret;
}

double performance_value(const RunLog& log, const EpisodeRecord& r) {
  return log.score_kind == ScoreKind::kReturn ? r.ret : r.objective;
}

RunSummary summarize(const RunLog& log, double tail_fraction) {
  RunSummary s;
  s.meta = log.meta;
  s.algorithms = log.algorithms;
  s.fingerprint = log.fingerprint;
  s.run = log.run;
  s.valid = log.valid;
  s.length = static_cast<std::int64_t>(log.episodes.size());
  const std::size_t K = log.algorithms.size();
  const auto epochs = static_cast<std::size_t>(log.epochs());
  s.epoch_performance.assign(epochs, 0.0);
  s.epoch_fractions.assign(epochs, std::vector<double>(K, 0.0));
  std::vector<double> counts(epochs, 0.0);
  for (const auto& r : log.episodes) {
    if (r.algo >= K) throw DataError("log refers to algorithm " + std::to_string(r.algo));
    const auto b = static_cast<std::size_t>(r.epoch);
    if (b >= epochs) throw DataError("log epochs are not contiguous");
    s.score_sum += log.score(r);
    s.epoch_performance[b] += performance_value(log, r);
    s.epoch_fractions[b][r.algo] += 1.0;
    counts[b] += 1.0;
  }
  for (std::size_t b = 0; b < epochs; ++b) {
    if (counts[b] == 0.0) continue;
    s.epoch_performance[b] /= counts[b];
    for (auto& f : s.epoch_fractions[b]) f /= counts[b];
  }
  if (log.episodes.size() >= kMinTailLogLength) s.tail = tail_mean(log, tail_fraction);
  if (!log.epoch_values.empty()) {
    s.short_sighted = short_sighted_pseudo_regret(log, s.length);
    s.epoch_values = log.epoch_values;
  }
  return s;
}

std::vector<std::vector<MeanCi>> selection_ratios(std::span<const RunSummary> runs, std::size_t arms) {
  const std::size_t epochs = detail::epoch_count(runs);
  std::vector<std::vector<MeanCi>> out(epochs, std::vector<MeanCi>(arms));
  for (std::size_t b = 0; b < epochs; ++b) {
    for (std::size_t k = 0; k < arms; ++k) {
      std::vector<double> xs;
      for (const auto& r : runs) {
        if (b < r.epoch_fractions.size() && k < r.epoch_fractions[b].size()) xs.push_back(r.epoch_fractions[b][k]);
      }
      out[b][k] = mean_ci(xs);
    }
  }
  return out;
}

std::vector<std::vector<MeanCi>> selection_ratios(std::span<const RunLog> logs, std::size_t arms) {
  std::vector<RunSummary> runs;
  for (const auto& log : logs) runs.push_back(summarize(log));
  return selection_ratios(std::span<const RunSummary>(runs), arms);
}

std::vector<MeanCi> performance_per_epoch(std::span<const RunSummary> runs) {
  const std::size_t epochs = detail::epoch_count(runs);
  std::vector<MeanCi> out;
  for (std::size_t b = 0; b < epochs; ++b) {
    std::vector<double> xs;
    for (const auto& r : runs) {
      if (b < r.epoch_performance.size()) xs.push_back(r.epoch_performance[b]);
    }
    out.push_back(mean_ci(xs));
  }
  return out;
}

std::vector<MeanCi> performance_per_epoch(std::span<const RunLog> logs) {
  std::vector<RunSummary> runs;
  for (const auto& log : logs) runs.push_back(summarize(log));
  return performance_per_epoch(std::span<const RunSummary>(runs));
}

RegretReport build_regret_report(std::span<const RunSummary> meta,
                                        std::span<const std::vector<RunSummary>> canonical) {
  if (meta.empty()) throw DataError("no meta-algorithm logs");
  RegretReport rep;
  const auto& first = meta.front();
  rep.meta = first.meta;
  rep.algorithms = first.algorithms;
  rep.fingerprint = first.fingerprint;
  rep.runs = meta.size();
  const std::size_t K = rep.algorithms.size();
  if (canonical.size() != K) throw DataError("need canonical logs for every portfolio member");
  for (const auto& runs : canonical) {
    if (runs.size() != meta.size()) throw DataError("canonical and meta run counts differ");
  }

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < meta.size(); ++i) {
    bool ok = meta[i].valid;
    for (const auto& runs : canonical) ok = ok && runs[i].valid;
    if (ok) usable.push_back(i);
  }
  rep.valid = usable.size() == meta.size();
  rep.valid_runs = usable.size();
  if (usable.empty()) throw DataError("no run has valid logs for every meta-algorithm");

  rep.horizon = meta[usable.front()].length;
  for (std::size_t i : usable) {
    bool same = meta[i].length == rep.horizon;
    for (const auto& runs : canonical) same = same && runs[i].length == rep.horizon;
    if (!same) throw DataError("paired logs have different lengths");
  }

  rep.optimal_return = -std::numeric_limits<double>::infinity();
  for (const auto& runs : canonical) {
    double sum = 0.0;
    for (std::size_t i : usable) {
      if (!runs[i].tail) {
        throw DataError("log " + runs[i].meta + " is shorter than " + std::to_string(kMinTailLogLength) + " episodes");
      }
      sum += *runs[i].tail;
    }
    rep.optimal_return = std::max(rep.optimal_return, sum / static_cast<double>(usable.size()));
  }

  const double T = static_cast<double>(rep.horizon);
  std::vector<double> meta_abs;
  for (std::size_t i : usable) meta_abs.push_back(T * rep.optimal_return - meta[i].score_sum);
  rep.absolute_meta = mean_ci(meta_abs);
  std::vector<std::vector<double>> canon_abs(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i : usable) canon_abs[k].push_back(T * rep.optimal_return - canonical[k][i].score_sum);
    rep.absolute_canonical.push_back(mean_ci(canon_abs[k]));
  }
  for (std::size_t k = 1; k < K; ++k) {
    if (rep.absolute_canonical[k].mean < rep.absolute_canonical[rep.best_algorithm].mean) rep.best_algorithm = k;
    if (rep.absolute_canonical[k].mean > rep.absolute_canonical[rep.worst_algorithm].mean) rep.worst_algorithm = k;
  }
  std::vector<double> rel_best;
  std::vector<double> rel_worst;
  for (std::size_t j = 0; j < meta_abs.size(); ++j) {
    rel_best.push_back(meta_abs[j] - canon_abs[rep.best_algorithm][j]);
    rel_worst.push_back(meta_abs[j] - canon_abs[rep.worst_algorithm][j]);
  }
  rep.relative_best = mean_ci(rel_best);
  rep.relative_worst = mean_ci(rel_worst);

  const bool evaluated = std::all_of(usable.begin(), usable.end(),
                                     [&](std::size_t i) { return meta[i].short_sighted.has_value(); });
  if (evaluated) {
    std::vector<double> ss;
    std::size_t epochs = 0;
    for (std::size_t i : usable) {
      ss.push_back(*meta[i].short_sighted);
      epochs = std::max(epochs, meta[i].epoch_values.size());
    }
    rep.short_sighted = mean_ci(ss);
    for (std::size_t b = 0; b < epochs; ++b) {
      std::vector<std::vector<double>> gaps(K);
      std::vector<double> daggers;
      for (std::size_t i : usable) {
        if (b >= meta[i].epoch_values.size()) continue;
        const auto g = epoch_gaps(meta[i].epoch_values[b]);
        for (std::size_t k = 0; k < K && k < g.gaps.size(); ++k) gaps[k].push_back(g.gaps[k]);
        if (g.dagger) daggers.push_back(*g.dagger);
      }
      std::vector<MeanCi> row;
      for (std::size_t k = 0; k < K; ++k) row.push_back(mean_ci(gaps[k]));
      rep.epoch_gaps.push_back(std::move(row));
      rep.epoch_dagger.push_back(daggers.empty() ? std::nullopt : std::optional<MeanCi>(mean_ci(daggers)));
    }
  }

  std::vector<RunSummary> meta_used;
  for (std::size_t i : usable) meta_used.push_back(meta[i]);
  rep.ratios = selection_ratios(std::span<const RunSummary>(meta_used), K);
  rep.performance_meta = performance_per_epoch(std::span<const RunSummary>(meta_used));
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<RunSummary> used;
    for (std::size_t i : usable) used.push_back(canonical[k][i]);
    rep.performance_canonical.push_back(performance_per_epoch(std::span<const RunSummary>(used)));
  }
  return rep;
}

RegretReport build_regret_report(std::span<const RunLog> meta_logs,
                                        std::span<const std::vector<RunLog>> canonical,
                                        double tail_fraction) {
  std::vector<RunSummary> meta;
  for (const auto& log : meta_logs) meta.push_back(summarize(log, tail_fraction));
  std::vector<std::vector<RunSummary>> canon;
  for (const auto& runs : canonical) {
    auto& out = canon.emplace_back();
    for (const auto& log : runs) out.push_back(summarize(log, tail_fraction));
  }
  return build_regret_report(std::span<const RunSummary>(meta), std::span<const std::vector<RunSummary>>(canon));
}

nlohmann::json to_json_value(const MeanCi& m) {
  return {{"mean", m.mean}, {"ci95", m.ci95}, {"n", m.n}};
}

nlohmann::json to_json_value(const RegretReport& rep) {
  nlohmann::json j;
  j["schema"] = RegretReport::kSchema;
  j["meta"] = rep.meta;
  j["algorithms"] = rep.algorithms;
  j["fingerprint"] = rep.fingerprint;
  j["runs"] = rep.runs;
  j["valid_runs"] = rep.valid_runs;
  j["horizon"] = rep.horizon;
  j["valid"] = rep.valid;
  j["optimal_return_estimate"] = rep.optimal_return;
  j["absolute"]["meta"] = to_json_value(rep.absolute_meta);
  for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
    j["absolute"]["canonical"][rep.algorithms[k]] = to_json_value(rep.absolute_canonical[k]);
  }
  j["best_algorithm"] = rep.algorithms[rep.best_algorithm];
  j["worst_algorithm"] = rep.algorithms[rep.worst_algorithm];
  j["relative"]["with_best"] = to_json_value(rep.relative_best);
  j["relative"]["with_worst"] = to_json_value(rep.relative_worst);
  j["short_sighted"] = rep.short_sighted ? to_json_value(*rep.short_sighted) : nlohmann::json(nullptr);
  j["epoch_gaps"] = nlohmann::json::array();
  for (std::size_t b = 0; b < rep.epoch_gaps.size(); ++b) {
    nlohmann::json row;
    row["epoch"] = b;
    for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
      row["gaps"][rep.algorithms[k]] = to_json_value(rep.epoch_gaps[b][k]);
    }
    row["smallest_nonzero_gap"] = rep.epoch_dagger[b] ? to_json_value(*rep.epoch_dagger[b]) : nlohmann::json(nullptr);
    j["epoch_gaps"].push_back(row);
  }
  j["selection_ratios"] = nlohmann::json::array();
  for (std::size_t b = 0; b < rep.ratios.size(); ++b) {
    nlohmann::json row;
    row["epoch"] = b;
    for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
      row["ratios"][rep.algorithms[k]] = to_json_value(rep.ratios[b][k]);
    }
    j["selection_ratios"].push_back(row);
  }
  return j;
}
}  // namespace esbas
