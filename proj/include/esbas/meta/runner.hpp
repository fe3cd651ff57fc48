#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "esbas/algorithms/learner.hpp"
#include "esbas/bandit/sliding_window.hpp"
#include "esbas/bandit/ucb1.hpp"
#include "esbas/core/errors.hpp"
#include "esbas/core/portfolio.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"
#include "esbas/meta/episode.hpp"
#include "esbas/meta/schedule.hpp"
#include "esbas/metrics/evaluation.hpp"
#include "esbas/metrics/run_log.hpp"

namespace esbas {

/// Portfolio descriptors paired with learner prototypes. Every run clones the
/// prototypes so runs never share learner state.
template <class Env>
class LearnerPortfolio {
 public:
  using LearnerPtr = std::unique_ptr<Learner<Env>>;

  LearnerPortfolio(Portfolio descriptors, std::vector<LearnerPtr> prototypes)
      : descriptors_(std::move(descriptors)) {
    if (prototypes.size() != descriptors_.size()) {
      throw ConfigError("portfolio needs one learner per descriptor");
    }
    for (auto& p : prototypes) {
      if (!p) throw ConfigError("null learner in portfolio");
      prototypes_.push_back(std::shared_ptr<const Learner<Env>>(std::move(p)));
    }
  }

  const Portfolio& descriptors() const noexcept { return descriptors_; }
  std::size_t size() const noexcept { return descriptors_.size(); }
  const Learner<Env>& prototype(std::size_t k) const { return *prototypes_.at(k); }

  std::vector<LearnerPtr> instantiate() const {
    std::vector<LearnerPtr> out;
    out.reserve(prototypes_.size());
    for (const auto& p : prototypes_) out.push_back(p->clone());
    return out;
  }

 private:
  Portfolio descriptors_;
  std::vector<std::shared_ptr<const Learner<Env>>> prototypes_;
};

enum class MetaKind { kEsbas, kSsbas, kCanonical, kRoundRobin };

struct MetaOptions {
  double xi = 0.25;
  // ESBAS: arms of constant algorithms keep their statistics across epochs.
  bool no_reset_constant_arms = false;
  // Sliding mode: batch learners refit every this many episodes.
  int learner_update_period = 1;
  // Epochal mode: greedy rollouts per algorithm at each epoch start (0 = off).
  int evaluation_rollouts = 0;
  std::string fingerprint;
};

/// What to run. In epochal mode `schedule` fixes the freeze epochs; in
/// sliding mode (SSBAS, or baselines run alongside it) it only buckets
/// episodes for reporting.
struct MetaSpec {
  MetaKind kind = MetaKind::kEsbas;
  std::size_t arm = 0;   // canonical arm
  bool sliding = false;  // forced on for SSBAS
  EpochSchedule schedule = EpochSchedule::power_of_two();
  MetaOptions options;

  bool is_sliding() const noexcept { return sliding || kind == MetaKind::kSsbas; }
};

/// Observation points for tests and diagnostics. All optional.
template <class Env>
struct RunHooks {
  using Learners = std::span<const std::unique_ptr<Learner<Env>>>;
  // After the epoch's retrain and bandit reset, before its first selection.
  std::function<void(int epoch, const BanditState&, Learners, std::size_t data_size)> on_epoch_start;
  std::function<void(std::int64_t tau, int epoch, Learners)> before_episode;
  std::function<void(std::int64_t tau, const SlidingWindowBandit&, std::size_t arm)> on_window_select;
  // After the episode was logged and the epochal bandit updated.
  std::function<void(std::int64_t tau, std::size_t arm, const BanditState&)> after_episode;
};

inline std::string meta_label(const MetaSpec& spec, const Portfolio& portfolio) {
  switch (spec.kind) {
    case MetaKind::kEsbas: return "esbas";
    case MetaKind::kSsbas: return "ssbas";
    case MetaKind::kRoundRobin: return "round-robin";
    case MetaKind::kCanonical: return "canonical:" + portfolio[spec.arm].id;
  }
  return "unknown";
}

namespace detail {

inline std::string learner_label(std::string_view what, std::size_t k) {
  return std::string(what) + "-" + std::to_string(k);
}

}  // namespace detail

/// Runs one meta-algorithm for T episodes.
///
/// Epochal mode: at each epoch boundary every learner in play retrains once on
/// the whole shared trajectory set, the bandit is reset (constant arms kept on
/// request), and within the epoch policies stay frozen.
///
/// Sliding mode: per-transition learners update after every episode, batch
/// learners refit every learner_update_period episodes, and SSBAS selects with
/// UCB1 over the last floor(tau/2) selections.
///
/// Canonical runs only train the selected learner; the others never act.
/// Randomness: the environment draws from ("environment", tau) and the acting
/// learner k from ("learner-act-k", tau), so paired runs of different
/// meta-algorithms replay the same environment noise episode by episode.
template <class Env>
RunLog run_meta(const LearnerPortfolio<Env>& portfolio, const Env& env_prototype,
                const MetaSpec& spec, std::int64_t T, const RunSeeds& seeds,
                const RunHooks<Env>* hooks = nullptr) {
  const std::size_t K = portfolio.size();
  if (T < 1) throw ConfigError("total meta-time must be >= 1");
  if (!spec.schedule.covers(T)) {
    throw ConfigError("epoch schedule covers " + std::to_string(spec.schedule.total()) +
                      " meta-time steps, fewer than T = " + std::to_string(T));
  }
  if (spec.kind == MetaKind::kCanonical && spec.arm >= K) {
    throw LookupError("canonical arm out of range: " + std::to_string(spec.arm));
  }
  if (spec.options.learner_update_period < 1) throw ConfigError("learner_update_period must be >= 1");
  const bool sliding = spec.is_sliding();

  RunLog log;
  log.meta = meta_label(spec, portfolio.descriptors());
  log.algorithms = portfolio.descriptors().ids();
  log.fingerprint = spec.options.fingerprint;
  log.seed = seeds.master;
  log.run = seeds.run;
  log.score_kind = Env::kBanditUsesObjective ? ScoreKind::kNegObjective : ScoreKind::kReturn;
  log.episodes.reserve(static_cast<std::size_t>(T));

  auto learners = portfolio.instantiate();
  const typename RunHooks<Env>::Learners learner_view(learners);
  std::vector<bool> in_play(K, spec.kind != MetaKind::kCanonical);
  if (spec.kind == MetaKind::kCanonical) in_play[spec.arm] = true;

  std::vector<bool> keep_arms(K, false);
  if (spec.options.no_reset_constant_arms) {
    for (std::size_t k = 0; k < K; ++k) keep_arms[k] = portfolio.descriptors()[k].is_constant;
  }

  BanditState bandit(K, spec.options.xi);
  SlidingWindowBandit window(K, spec.options.xi);
  TrajectorySet<typename Env::Observation> data;
  Env env = env_prototype;
  std::vector<std::int64_t> retrains(K, 0);

  auto retrain = [&](std::size_t k) {
    auto rng = seeds.stream(detail::learner_label("learner-train", k), static_cast<std::uint64_t>(retrains[k]++));
    learners[k]->retrain(data, rng);
  };

  int current_epoch = -1;
  for (std::int64_t tau = 1; tau <= T; ++tau) {
    const int epoch = spec.schedule.epoch_of(tau);

    if (epoch != current_epoch) {
      current_epoch = epoch;
      if (!sliding) {
        for (std::size_t k = 0; k < K; ++k) {
          if (in_play[k]) retrain(k);
        }
        reset(bandit, keep_arms);
        if (spec.options.evaluation_rollouts > 0) {
          log.epoch_values.push_back(evaluate_frozen_policies<Env>(
              learner_view, env_prototype, spec.options.evaluation_rollouts, seeds,
              static_cast<std::uint64_t>(epoch)));
        }
      }
      if (hooks && hooks->on_epoch_start) hooks->on_epoch_start(epoch, bandit, learner_view, data.size());
    }
    if (hooks && hooks->before_episode) hooks->before_episode(tau, epoch, learner_view);

    std::size_t arm = 0;
    switch (spec.kind) {
      case MetaKind::kEsbas:
        arm = ucb1_select(bandit);
        break;
      case MetaKind::kSsbas:
        arm = window.select(tau);
        if (hooks && hooks->on_window_select) hooks->on_window_select(tau, window, arm);
        break;
      case MetaKind::kCanonical:
        arm = spec.arm;
        break;
      case MetaKind::kRoundRobin:
        arm = static_cast<std::size_t>((tau - 1) % static_cast<std::int64_t>(K));
        break;
    }

    auto env_rng = seeds.stream("environment", static_cast<std::uint64_t>(tau));
    auto act_rng = seeds.stream(detail::learner_label("learner-act", arm), static_cast<std::uint64_t>(tau));
    Episode<typename Env::Observation> episode;
    try {
      episode = play_episode(env, *learners[arm], ExplorationClock{tau, epoch}, true, env_rng, act_rng);
    } catch (const std::exception& e) {
      log.valid = false;
      log.error = "meta-time " + std::to_string(tau) + ": " + e.what();
      return log;
    }
    episode.trajectory.controller = arm;

    const double ret = compute_return(episode.trajectory, env.gamma());
    const double objective = env.objective(episode.trajectory, ret);
    const double reward = env.bandit_reward(ret, objective);
    log.episodes.push_back({tau, epoch, arm, ret, objective,
                            static_cast<std::int64_t>(episode.trajectory.size()),
                            episode.invalid_action});

    if (spec.kind == MetaKind::kEsbas) ucb1_update(bandit, arm, reward);
    if (spec.kind == MetaKind::kSsbas) window.record(tau, arm, reward);
    if (hooks && hooks->after_episode) hooks->after_episode(tau, arm, bandit);

    const auto& stored = data.append(std::move(episode.trajectory));
    if (sliding) {
      for (std::size_t k = 0; k < K; ++k) {
        if (!in_play[k]) continue;
        if (learners[k]->updates_per_transition()) {
          auto rng = seeds.stream(detail::learner_label("learner-observe", k), static_cast<std::uint64_t>(tau));
          learners[k]->observe(stored, rng);
        } else if (tau % spec.options.learner_update_period == 0) {
          retrain(k);
        }
      }
    }
  }
  return log;
}

template <class Env>
RunLog run_esbas(const LearnerPortfolio<Env>& portfolio, const Env& env, EpochSchedule schedule,
                 std::int64_t T, const RunSeeds& seeds, MetaOptions options = {},
                 const RunHooks<Env>* hooks = nullptr) {
  return run_meta(portfolio, env, MetaSpec{MetaKind::kEsbas, 0, false, std::move(schedule), std::move(options)},
                  T, seeds, hooks);
}

// `report_schedule` only buckets episodes into reporting epochs.
template <class Env>
RunLog run_ssbas(const LearnerPortfolio<Env>& portfolio, const Env& env, int learner_update_period,
                 std::int64_t T, const RunSeeds& seeds, MetaOptions options = {},
                 EpochSchedule report_schedule = EpochSchedule::power_of_two(),
                 const RunHooks<Env>* hooks = nullptr) {
  options.learner_update_period = learner_update_period;
  return run_meta(portfolio, env, MetaSpec{MetaKind::kSsbas, 0, true, std::move(report_schedule), std::move(options)},
                  T, seeds, hooks);
}

template <class Env>
RunLog run_canonical(const LearnerPortfolio<Env>& portfolio, std::size_t arm, const Env& env,
                     EpochSchedule schedule, std::int64_t T, const RunSeeds& seeds,
                     MetaOptions options = {}, bool sliding = false,
                     const RunHooks<Env>* hooks = nullptr) {
  return run_meta(portfolio, env, MetaSpec{MetaKind::kCanonical, arm, sliding, std::move(schedule), std::move(options)},
                  T, seeds, hooks);
}

}  // namespace esbas
