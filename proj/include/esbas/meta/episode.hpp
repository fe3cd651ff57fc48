#pragma once

#include "esbas/algorithms/learner.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"

namespace esbas {

template <class Obs>
struct Episode {
  Trajectory<Obs> trajectory;
  bool invalid_action = false;
};

/// Plays one episode of `env` under `learner`. The environment draws from
/// `env_rng`, the policy from `act_rng`.
template <class Env>
Episode<typename Env::Observation> play_episode(Env& env, const Learner<Env>& learner,
                                                ExplorationClock clock, bool explore,
                                                RngStream& env_rng, RngStream& act_rng) {
  Episode<typename Env::Observation> out;
  auto& steps = out.trajectory.triplets;
  auto obs = env.reset(env_rng);
  for (;;) {
    const int action = learner.act(steps, obs, clock, explore, act_rng);
    auto result = env.step(action, env_rng);
    steps.push_back({std::move(obs), action, result.reward});
    out.invalid_action = out.invalid_action || result.invalid_action;
    if (result.done) {
      if (result.truncated) out.trajectory.cutoff_observation = std::move(result.observation);
      break;
    }
    obs = std::move(result.observation);
  }
  return out;
}

}  // namespace esbas
