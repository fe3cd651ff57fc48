#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "esbas/algorithms/dialogue_features.hpp"
#include "esbas/algorithms/fqi.hpp"
#include "esbas/algorithms/q_learning.hpp"
#include "esbas/envs/dialogue.hpp"
#include "esbas/envs/gridworld.hpp"
#include "esbas/harness/config.hpp"
#include "esbas/meta/episode.hpp"
#include "esbas/meta/runner.hpp"
#include "esbas/metrics/evaluation.hpp"

namespace esbas {

// Indicator of every tabular state id: linear FQI on these features is
// tabular fitted Q-iteration.
inline FeatureSet<GridObservation> gridworld_one_hot_features(std::size_t state_count) {
  std::vector<BaseFeature<GridObservation>> base;
  base.reserve(state_count);
  for (std::size_t s = 0; s < state_count; ++s) {
    base.push_back({"s" + std::to_string(s),
                    [s](const GridObservation& o) { return o.state_id() == s ? 1.0 : 0.0; }});
  }
  return FeatureSet<GridObservation>("one-hot", std::move(base), false, 0, false);
}

template <class Env>
FeatureSet<typename Env::Observation> make_features(const Env& env, const std::string& name) {
  if constexpr (std::is_same_v<Env, DialogueEnv>) {
    (void)env;
    return dialogue_feature_set(name);
  } else {
    if (name != "one-hot") throw ConfigError("gridworld learners only support the one-hot feature set");
    return gridworld_one_hot_features(env.state_count());
  }
}

/// Greedy FQI fit on `episodes` uniformly random episodes. Used to freeze a
/// reproducible constant policy from two integers.
template <class Env>
LinearQ warmup_policy(const Env& env, const FeatureSet<typename Env::Observation>& features,
                      const FqiOptions& options, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("warm-up needs at least one episode");
  const RunSeeds seeds{seed, 0};
  const FqiLearner<Env> random(features, options, EpsilonSchedule::constant(1.0));
  TrajectorySet<typename Env::Observation> data;
  Env sim = env;
  for (int i = 1; i <= episodes; ++i) {
    auto env_rng = seeds.stream("warmup-environment", static_cast<std::uint64_t>(i));
    auto act_rng = seeds.stream("warmup-act", static_cast<std::uint64_t>(i));
    data.append(play_episode(sim, random, ExplorationClock{i, 0}, true, env_rng, act_rng).trajectory);
  }
  auto rng = seeds.stream("warmup-train", 0);
  return fqi_train(data, features, Env::kNumActions, options.gamma, options.iterations,
                   options.regularization, rng);
}

template <class Env>
std::unique_ptr<Learner<Env>> build_learner(const AlgorithmSpec& a, const Env& env) {
  switch (a.kind) {
    case LearnerKind::kFittedQ:
      return std::make_unique<FqiLearner<Env>>(make_features(env, a.features),
                                               FqiOptions{a.gamma, a.iterations, a.regularization}, a.epsilon);
    case LearnerKind::kQLearning:
      if constexpr (TabularObservation<typename Env::Observation>) {
        return std::make_unique<QLearner<Env>>(env.state_count(), a.learning_rate, a.gamma, a.epsilon);
      } else {
        throw ConfigError("algorithm " + a.id + ": q-learning needs a tabular environment");
      }
    case LearnerKind::kConstant: {
      auto features = make_features(env, a.features);
      LinearQ model;
      if (!a.params_path.empty()) {
        std::ifstream in(a.params_path);
        if (!in) throw ConfigError("algorithm " + a.id + ": cannot read " + a.params_path);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
          model = LinearQ::deserialize(buf.str());
        } catch (const std::exception& e) {
          throw ConfigError("algorithm " + a.id + ": " + e.what());
        }
      } else {
        model = warmup_policy(env, features, FqiOptions{a.gamma, a.iterations, a.regularization},
                              a.warmup_episodes, a.warmup_seed);
      }
      return std::make_unique<ConstantLearner<Env>>(std::move(features), std::move(model), a.declared_mean);
    }
  }
  throw ConfigError("algorithm " + a.id + ": unknown kind");
}

template <class Env>
LearnerPortfolio<Env> build_portfolio(const ExperimentConfig& cfg, const Env& env) {
  std::vector<std::unique_ptr<Learner<Env>>> learners;
  for (const auto& a : cfg.algorithms) learners.push_back(build_learner(a, env));
  return LearnerPortfolio<Env>(cfg.portfolio(), std::move(learners));
}

struct ConstantCandidate {
  int warmup_episodes = 0;
  std::uint64_t warmup_seed = 0;
  double value = 0.0;  // mean greedy score
};

/// Greedy value of the warm-up policy for every (size, seed) pair, all
/// evaluated on the same rollout streams.
template <class Env>
std::vector<ConstantCandidate> survey_constant_policies(const Env& env,
                                                        const FeatureSet<typename Env::Observation>& features,
                                                        const FqiOptions& options, const std::vector<int>& sizes,
                                                        const std::vector<std::uint64_t>& seeds, int rollouts,
                                                        std::uint64_t evaluation_seed) {
  std::vector<ConstantCandidate> out;
  for (int size : sizes) {
    for (auto seed : seeds) {
      std::vector<std::unique_ptr<Learner<Env>>> policy;
      policy.push_back(std::make_unique<ConstantLearner<Env>>(features, warmup_policy(env, features, options, size, seed)));
      const auto values = evaluate_frozen_policies<Env>(policy, env, rollouts, RunSeeds{evaluation_seed, 0});
      out.push_back({size, seed, values.front()});
    }
  }
  return out;
}

}  // namespace esbas
