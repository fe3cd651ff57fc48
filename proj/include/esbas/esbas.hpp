#pragma once

#include "esbas/algorithms/dialogue_features.hpp"
#include "esbas/algorithms/exploration.hpp"
#include "esbas/algorithms/features.hpp"
#include "esbas/algorithms/fqi.hpp"
#include "esbas/algorithms/learner.hpp"
#include "esbas/algorithms/params_io.hpp"
#include "esbas/algorithms/q_learning.hpp"
#include "esbas/bandit/sliding_window.hpp"
#include "esbas/bandit/ucb1.hpp"
#include "esbas/core/errors.hpp"
#include "esbas/core/portfolio.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"
#include "esbas/envs/dialogue.hpp"
#include "esbas/envs/gridworld.hpp"
#include "esbas/envs/step.hpp"
#include "esbas/harness/build.hpp"
#include "esbas/harness/config.hpp"
#include "esbas/harness/experiment.hpp"
#include "esbas/meta/episode.hpp"
#include "esbas/meta/runner.hpp"
#include "esbas/meta/schedule.hpp"
#include "esbas/metrics/evaluation.hpp"
#include "esbas/metrics/regret.hpp"
#include "esbas/metrics/run_log.hpp"
