#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esbas/core/errors.hpp"

namespace esbas {

/// One RL-time step: what the controller saw, what it did, what it got.
template <class Obs>
struct Triplet {
  Obs observation;
  int action = 0;
  double reward = 0.0;
};

/// A completed episode. `controller` is the portfolio index of the algorithm
/// that generated it; `meta_time` is its 1-based position in the trajectory set.
template <class Obs>
struct Trajectory {
  std::vector<Triplet<Obs>> triplets;
  std::size_t controller = 0;
  std::int64_t meta_time = 0;
  // Set when the episode was cut by a time limit rather than reaching a
  // terminal state; learners may bootstrap from it.
  std::optional<Obs> cutoff_observation;

  std::size_t size() const noexcept { return triplets.size(); }
  bool empty() const noexcept { return triplets.empty(); }
};

inline void check_discount(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("discount factor must lie in [0, 1), got " + std::to_string(gamma));
  }
}

// Discounted return: sum_t gamma^(t-1) r_t.
inline double compute_return(std::span<const double> rewards, double gamma) {
  check_discount(gamma);
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

template <class Obs>
double compute_return(const Trajectory<Obs>& trajectory, double gamma) {
  check_discount(gamma);
  double total = 0.0;
  double discount = 1.0;
  for (const auto& step : trajectory.triplets) {
    total += discount * step.reward;
    discount *= gamma;
  }
  return total;
}

/// Append-only episode log shared by every learner of a run.
template <class Obs>
class TrajectorySet {
 public:
  using value_type = Trajectory<Obs>;

  // Stamps the episode with the next meta-time and returns a reference to it.
  const Trajectory<Obs>& append(Trajectory<Obs> episode) {
    episode.meta_time = static_cast<std::int64_t>(episodes_.size()) + 1;
    transitions_ += episode.size();
    episodes_.push_back(std::move(episode));
    return episodes_.back();
  }

  std::span<const Trajectory<Obs>> episodes() const noexcept { return episodes_; }
  const Trajectory<Obs>& operator[](std::size_t i) const { return episodes_[i]; }
  std::size_t size() const noexcept { return episodes_.size(); }
  bool empty() const noexcept { return episodes_.empty(); }
  std::size_t transition_count() const noexcept { return transitions_; }

  auto begin() const noexcept { return episodes_.begin(); }
  auto end() const noexcept { return episodes_.end(); }

 private:
  std::vector<Trajectory<Obs>> episodes_;
  std::size_t transitions_ = 0;
};

template <class Obs>
using TrajectoryView = std::vector<std::reference_wrapper<const Trajectory<Obs>>>;

}  // namespace esbas
