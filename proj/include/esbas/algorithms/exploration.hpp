#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "esbas/core/errors.hpp"
#include "esbas/core/rng.hpp"

namespace esbas {

// Where the run is when a learner is asked to act.
struct ExplorationClock {
  std::int64_t meta_time = 1;
  int epoch = 0;
};

/// epsilon as a function of the clock:
///   constant          eps
///   epoch-power       base^epoch
///   linear            start -> end over the first `episodes` meta-time steps
class EpsilonSchedule {
 public:
  enum class Kind { kConstant, kEpochPower, kLinear };

  static EpsilonSchedule constant(double eps) { return {Kind::kConstant, eps, eps, 0}; }
  static EpsilonSchedule epoch_power(double base) {
    if (!(base >= 0.0 && base <= 1.0)) throw ConfigError("epsilon base must lie in [0, 1]");
    return {Kind::kEpochPower, base, base, 0};
  }
  static EpsilonSchedule linear(double start, double end, std::int64_t episodes) {
    if (episodes <= 0) throw ConfigError("linear epsilon decay needs a positive episode count");
    return {Kind::kLinear, start, end, episodes};
  }

  double at(ExplorationClock clock) const {
    double eps = first_;
    switch (kind_) {
      case Kind::kConstant:
        break;
      case Kind::kEpochPower:
        eps = std::pow(first_, clock.epoch);
        break;
      case Kind::kLinear: {
        const double progress = std::min(
            1.0, static_cast<double>(clock.meta_time - 1) / static_cast<double>(episodes_));
        eps = first_ + (last_ - first_) * progress;
        break;
      }
    }
    return std::clamp(eps, 0.0, 1.0);
  }

  Kind kind() const noexcept { return kind_; }
  double first() const noexcept { return first_; }
  double last() const noexcept { return last_; }
  std::int64_t episodes() const noexcept { return episodes_; }

 private:
  EpsilonSchedule(Kind kind, double first, double last, std::int64_t episodes)
      : kind_(kind), first_(first), last_(last), episodes_(episodes) {}

  Kind kind_;
  double first_;
  double last_;
  std::int64_t episodes_;
};

// Lowest index wins ties.
inline int greedy_action(std::span<const double> values) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

/// With probability eps a uniformly random action, otherwise the greedy one.
/// The exploration coin is only drawn when eps > 0, so eps = 0 consumes no
/// randomness.
inline int epsilon_greedy(std::span<const double> values, double eps, RngStream& rng) {
  if (eps > 0.0 && rng.bernoulli(eps)) {
    return static_cast<int>(rng.uniform_index(values.size()));
  }
  return greedy_action(values);
}

}  // namespace esbas
