#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "esbas/algorithms/exploration.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"

namespace esbas {

/// Off-policy learner contract. A learner turns a trajectory set into a policy;
/// it never looks at which algorithm controlled an episode.
///
/// The meta layer calls retrain() at epoch boundaries (or every few episodes
/// for batch learners in sliding mode) and observe() after each episode for
/// learners that update per transition.
template <class Env>
class Learner {
 public:
  using Observation = typename Env::Observation;

  virtual ~Learner() = default;

  void retrain(const TrajectorySet<Observation>& data, RngStream& rng) {
    ++retrain_count_;
    last_training_size_ = data.size();
    do_retrain(data, rng);
  }

  virtual void observe(const Trajectory<Observation>& /*episode*/, RngStream& /*rng*/) {}

  virtual bool updates_per_transition() const { return false; }

  // `history` is the current episode so far; implemented learners only use
  // the current observation.
  virtual int act(std::span<const Triplet<Observation>> history, const Observation& obs,
                  ExplorationClock clock, bool explore, RngStream& rng) const = 0;

  // Serialized parameters, bit-stable for identical models.
  virtual std::string snapshot() const = 0;

  virtual std::unique_ptr<Learner> clone() const = 0;

  std::int64_t retrain_count() const noexcept { return retrain_count_; }
  std::size_t last_training_size() const noexcept { return last_training_size_; }

 protected:
  virtual void do_retrain(const TrajectorySet<Observation>& data, RngStream& rng) = 0;

 private:
  std::int64_t retrain_count_ = 0;
  std::size_t last_training_size_ = 0;
};

}  // namespace esbas
