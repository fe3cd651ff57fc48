#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esbas/algorithms/exploration.hpp"
#include "esbas/algorithms/params_io.hpp"
#include "esbas/core/errors.hpp"
#include "esbas/core/portfolio.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/envs/dialogue.hpp"
#include "esbas/envs/gridworld.hpp"
#include "esbas/meta/runner.hpp"
#include "esbas/meta/schedule.hpp"
#include "esbas/metrics/regret.hpp"

namespace esbas {

enum class EnvKind { kDialogue, kGridworld };

struct EnvironmentSpec {
  EnvKind kind = EnvKind::kDialogue;
  DialogueConfig dialogue;
  GridworldConfig gridworld;
};

struct AlgorithmSpec {
  std::string id;
  LearnerKind kind = LearnerKind::kFittedQ;
  // fqi and constant
  std::string features;
  int iterations = 10;
  double regularization = 1e-3;
  // q-learning
  double learning_rate = 0.1;
  double gamma = 0.9;
  EpsilonSchedule epsilon = EpsilonSchedule::constant(0.0);
  // constant: either a parameter file, or a greedy FQI fit on random-policy episodes
  std::string params_path;
  int warmup_episodes = 0;
  std::uint64_t warmup_seed = 0;
  double declared_mean = 0.0;
};

struct ExperimentConfig {
  std::string name;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::int64_t episodes = 0;
  double tail_fraction = 0.1;

  EnvironmentSpec environment;
  MetaSpec meta;
  std::string canonical_arm;
  std::vector<AlgorithmSpec> algorithms;

  // Every resolved setting, defaults included, as "section.key" -> text.
  std::map<std::string, std::string> resolved;
  std::string fingerprint;

  Portfolio portfolio() const {
    std::vector<AlgorithmDescriptor> members;
    for (const auto& a : algorithms) {
      AlgorithmDescriptor d;
      d.id = a.id;
      d.kind = a.kind;
      d.is_constant = a.kind == LearnerKind::kConstant;
      const std::string prefix = "algo:" + a.id + ".";
      for (const auto& [key, value] : resolved) {
        if (key.starts_with(prefix)) d.hyperparameters[key.substr(prefix.size())] = value;
      }
      members.push_back(std::move(d));
    }
    return Portfolio(std::move(members));
  }
};

/// Parses and validates an experiment description.
///
/// Sections: [experiment] [environment] [meta] [evaluation] [portfolio] and
/// one [algo:<id>] per portfolio member. Relative paths resolve against
/// `base_dir`. `seed_override` replaces experiment.seed.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                              std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

// The resolved settings as an INI document (defaults spelled out).
std::string resolved_ini(const ExperimentConfig& cfg);

}  // namespace esbas
