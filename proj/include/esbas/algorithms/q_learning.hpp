#pragma once

#include <cmath>
#include <concepts>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "esbas/algorithms/exploration.hpp"
#include "esbas/algorithms/learner.hpp"
#include "esbas/algorithms/params_io.hpp"
#include "esbas/core/errors.hpp"

namespace esbas {

template <class Obs>
concept TabularObservation = requires(const Obs& o) {
  { o.state_id() } -> std::convertible_to<std::size_t>;
};

struct QTable {
  std::size_t states = 0;
  std::size_t actions = 0;
  double learning_rate = 0.1;
  std::vector<double> values;

  QTable() = default;
  QTable(std::size_t states_, std::size_t actions_, double learning_rate_)
      : states(states_), actions(actions_), learning_rate(learning_rate_),
        values(states_ * actions_, 0.0) {
    if (!(learning_rate_ > 0.0 && learning_rate_ <= 1.0)) {
      throw ConfigError("Q-learning rate must lie in (0, 1], got " + std::to_string(learning_rate_));
    }
  }

  double& at(std::size_t s, std::size_t a) { return values[s * actions + a]; }
  double at(std::size_t s, std::size_t a) const { return values[s * actions + a]; }
  std::span<const double> row(std::size_t s) const { return {values.data() + s * actions, actions}; }

  double max_value(std::size_t s) const {
    auto r = row(s);
    double best = r[0];
    for (double v : r) best = v > best ? v : best;
    return best;
  }

  void clear() { std::fill(values.begin(), values.end(), 0.0); }
};

struct TabularTransition {
  std::size_t state = 0;
  int action = 0;
  double reward = 0.0;
  std::optional<std::size_t> next_state;  // empty at a terminal state
};

// Q(s,a) <- Q(s,a) + lr (r + gamma max_a' Q(s',a') - Q(s,a)).
inline void q_learning_update(QTable& table, const TabularTransition& t, double gamma) {
  if (!std::isfinite(t.reward)) throw DataError("Q-learning reward must be finite");
  if (!(table.learning_rate > 0.0 && table.learning_rate <= 1.0)) {
    throw ConfigError("Q-learning rate must lie in (0, 1]");
  }
  const double bootstrap = t.next_state ? table.max_value(*t.next_state) : 0.0;
  double& q = table.at(t.state, static_cast<std::size_t>(t.action));
  q += table.learning_rate * (t.reward + gamma * bootstrap - q);
}

template <TabularObservation Obs>
void for_each_transition(const Trajectory<Obs>& episode, auto&& fn) {
  const auto& steps = episode.triplets;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    TabularTransition tr{steps[t].observation.state_id(), steps[t].action, steps[t].reward, {}};
    if (t + 1 < steps.size()) {
      tr.next_state = steps[t + 1].observation.state_id();
    } else if (episode.cutoff_observation) {
      tr.next_state = episode.cutoff_observation->state_id();
    }
    fn(tr);
  }
}

/// Tabular Q-learning. In sliding mode it backs up every transition of every
/// episode as it arrives; a full retrain clears the table and replays the
/// whole trajectory set in meta-time order.
template <class Env>
  requires TabularObservation<typename Env::Observation>
class QLearner final : public Learner<Env> {
 public:
  using Observation = typename Env::Observation;

  QLearner(std::size_t states, double learning_rate, double gamma, EpsilonSchedule epsilon)
      : table_(states, Env::kNumActions, learning_rate), gamma_(gamma), epsilon_(epsilon) {
    check_discount(gamma);
  }

  bool updates_per_transition() const override { return true; }

  void observe(const Trajectory<Observation>& episode, RngStream&) override {
    for_each_transition(episode, [&](const TabularTransition& t) {
      q_learning_update(table_, t, gamma_);
    });
  }

  int act(std::span<const Triplet<Observation>>, const Observation& obs, ExplorationClock clock,
          bool explore, RngStream& rng) const override {
    const double eps = explore ? epsilon_.at(clock) : 0.0;
    return epsilon_greedy(table_.row(obs.state_id()), eps, rng);
  }

  std::string snapshot() const override {
    params_io::Document doc;
    doc.kind = "q-table";
    doc.fields = {{"states", std::to_string(table_.states)},
                  {"actions", std::to_string(table_.actions)},
                  {"learning_rate", params_io::format_double(table_.learning_rate)}};
    doc.values = table_.values;
    return params_io::write(doc);
  }

  std::unique_ptr<Learner<Env>> clone() const override {
    return std::make_unique<QLearner>(*this);
  }

  const QTable& table() const noexcept { return table_; }
  double gamma() const noexcept { return gamma_; }

 protected:
  void do_retrain(const TrajectorySet<Observation>& data, RngStream& rng) override {
    table_.clear();
    for (const auto& episode : data) observe(episode, rng);
  }

 private:
  QTable table_;
  double gamma_;
  EpsilonSchedule epsilon_;
};

}  // namespace esbas
