#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "esbas/algorithms/learner.hpp"
#include "esbas/core/errors.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/meta/episode.hpp"

namespace esbas {

/// Mean greedy score (the quantity the bandit maximises: the return, or the
/// negated objective) of each frozen policy over `rollouts` episodes.
///
/// Rollout m of every policy uses the same evaluation substreams (common
/// random numbers), so identical policies get identical estimates. The
/// environment is copied; the caller's instance is left untouched.
template <class Env>
std::vector<double> evaluate_frozen_policies(std::span<const std::unique_ptr<Learner<Env>>> policies,
                                             const Env& env, int rollouts, const RunSeeds& seeds,
                                             std::uint64_t evaluation_index = 0) {
  if (rollouts < 1) throw ConfigError("policy evaluation needs at least one rollout");
  std::vector<double> values;
  values.reserve(policies.size());
  for (const auto& policy : policies) {
    double total = 0.0;
    for (int m = 0; m < rollouts; ++m) {
      const std::uint64_t index = evaluation_index * static_cast<std::uint64_t>(rollouts) + m;
      auto env_rng = seeds.stream("eval-environment", index);
      auto act_rng = seeds.stream("eval-act", index);
      Env sim = env;
      const auto episode = play_episode(sim, *policy, ExplorationClock{}, false, env_rng, act_rng);
      const double ret = compute_return(episode.trajectory, sim.gamma());
      total += sim.bandit_reward(ret, sim.objective(episode.trajectory, ret));
    }
    values.push_back(total / rollouts);
  }
  return values;
}

}  // namespace esbas
