#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "esbas/algorithms/exploration.hpp"
#include "esbas/algorithms/features.hpp"
#include "esbas/algorithms/learner.hpp"
#include "esbas/algorithms/params_io.hpp"
#include "esbas/core/errors.hpp"

namespace esbas {

/// Per-action linear Q-function: Q(s, a) = w_a . phi(s).
struct LinearQ {
  std::size_t actions = 0;
  std::size_t dimension = 0;
  double regularization = 1e-3;
  int iterations = 10;
  std::vector<double> weights;  // actions x dimension, row per action

  LinearQ() = default;
  LinearQ(std::size_t actions_, std::size_t dimension_, double regularization_, int iterations_)
      : actions(actions_), dimension(dimension_), regularization(regularization_),
        iterations(iterations_), weights(actions_ * dimension_, 0.0) {}

  std::span<const double> action_weights(std::size_t a) const {
    return {weights.data() + a * dimension, dimension};
  }

  double value(std::size_t a, std::span<const double> phi) const {
    double q = 0.0;
    const double* w = weights.data() + a * dimension;
    for (std::size_t i = 0; i < dimension; ++i) q += w[i] * phi[i];
    return q;
  }

  void values(std::span<const double> phi, std::span<double> out) const {
    for (std::size_t a = 0; a < actions; ++a) out[a] = value(a, phi);
  }

  std::string serialize(bool trained = true) const {
    params_io::Document doc;
    doc.kind = "linear-q";
    doc.fields = {{"actions", std::to_string(actions)},
                  {"dimension", std::to_string(dimension)},
                  {"regularization", params_io::format_double(regularization)},
                  {"iterations", std::to_string(iterations)},
                  {"trained", trained ? "1" : "0"}};
    doc.values = weights;
    return params_io::write(doc);
  }

  static LinearQ deserialize(std::string_view text) {
    const auto doc = params_io::read(text);
    if (doc.kind != "linear-q") throw DataError("expected a linear-q parameter file, got " + doc.kind);
    LinearQ q(std::stoul(doc.field("actions")), std::stoul(doc.field("dimension")),
              params_io::parse_double(doc.field("regularization")),
              std::stoi(doc.field("iterations")));
    if (doc.values.size() != q.weights.size()) throw DataError("linear-q weight count mismatch");
    for (double v : doc.values) {
      if (!std::isfinite(v)) throw DataError("linear-q weights must be finite");
    }
    q.weights = doc.values;
    return q;
  }
};

/// Featurized transitions. Every triplet becomes a sample row; rows flagged
/// as non-samples only exist to be bootstrapped from (cut-off observations).
struct FqiBatch {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::size_t dimension = 0;
  RowMatrix features;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::int64_t> next_row;  // -1 at terminal
  std::vector<bool> is_sample;
};

template <class Obs>
FqiBatch make_fqi_batch(const TrajectorySet<Obs>& set, const FeatureSet<Obs>& features,
                        RngStream& rng) {
  FqiBatch batch;
  batch.dimension = features.dimension();
  std::size_t rows = set.transition_count();
  for (const auto& episode : set) rows += episode.cutoff_observation ? 1 : 0;
  batch.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(batch.dimension));
  batch.actions.reserve(rows);
  batch.rewards.reserve(rows);
  batch.next_row.reserve(rows);
  batch.is_sample.reserve(rows);

  Eigen::Index row = 0;
  auto featurize = [&](const Obs& obs) {
    features.evaluate(obs, rng, {batch.features.row(row).data(), batch.dimension});
    ++row;
  };
  for (const auto& episode : set) {
    const auto& steps = episode.triplets;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      featurize(steps[t].observation);
      batch.actions.push_back(steps[t].action);
      if (!std::isfinite(steps[t].reward)) throw DataError("FQI reward must be finite");
      batch.rewards.push_back(steps[t].reward);
      batch.is_sample.push_back(true);
      const bool last = t + 1 == steps.size();
      if (!last || episode.cutoff_observation) {
        batch.next_row.push_back(row);
      } else {
        batch.next_row.push_back(-1);
      }
    }
    if (episode.cutoff_observation) {
      featurize(*episode.cutoff_observation);
      batch.actions.push_back(0);
      batch.rewards.push_back(0.0);
      batch.next_row.push_back(-1);
      batch.is_sample.push_back(false);
    }
  }
  return batch;
}

/// Fitted-Q Iteration with per-action ridge regression.
///
/// Each round regresses y = r + gamma max_a' Q_prev(s', a') (0 at terminal)
/// on phi(s) separately for every action. The design matrices do not change
/// between rounds, so each action's regularised Gram matrix is factorised once.
/// Actions without samples keep zero weights.
inline LinearQ fqi_fit(const FqiBatch& batch, std::size_t num_actions, double gamma,
                       int iterations, double regularization) {
  check_discount(gamma);
  if (iterations < 1) throw ConfigError("FQI needs at least one iteration");
  if (!(regularization >= 0.0)) throw ConfigError("FQI regularization must be >= 0");

  const auto d = static_cast<Eigen::Index>(batch.dimension);
  const auto n = static_cast<Eigen::Index>(batch.actions.size());
  LinearQ model(num_actions, batch.dimension, regularization, iterations);

  std::vector<std::vector<Eigen::Index>> rows_of(num_actions);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!batch.is_sample[i]) continue;
    const int a = batch.actions[i];
    if (a < 0 || static_cast<std::size_t>(a) >= num_actions) throw DataError("action out of range");
    rows_of[a].push_back(i);
  }

  std::vector<Eigen::LDLT<Eigen::MatrixXd>> solvers(num_actions);
  for (std::size_t a = 0; a < num_actions; ++a) {
    if (rows_of[a].empty()) continue;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(d, d) * regularization;
    for (Eigen::Index i : rows_of[a]) {
      gram.selfadjointView<Eigen::Lower>().rankUpdate(batch.features.row(i).transpose());
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    solvers[a].compute(gram);
  }

  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(num_actions));
  Eigen::VectorXd targets(n);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::MatrixXd q = batch.features * weights;  // n x A
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int64_t next = batch.next_row[i];
      const double bootstrap = next >= 0 ? q.row(next).maxCoeff() : 0.0;
      targets[i] = batch.rewards[i] + gamma * bootstrap;
    }
    for (std::size_t a = 0; a < num_actions; ++a) {
      if (rows_of[a].empty()) continue;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
      for (Eigen::Index i : rows_of[a]) rhs += batch.features.row(i).transpose() * targets[i];
      weights.col(static_cast<Eigen::Index>(a)) = solvers[a].solve(rhs);
    }
  }

  for (std::size_t a = 0; a < num_actions; ++a) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double w = weights(j, static_cast<Eigen::Index>(a));
      if (!std::isfinite(w)) throw DataError("FQI produced non-finite weights");
      model.weights[a * batch.dimension + static_cast<std::size_t>(j)] = w;
    }
  }
  return model;
}

template <class Obs>
LinearQ fqi_train(const TrajectorySet<Obs>& set, const FeatureSet<Obs>& features,
                  std::size_t num_actions, double gamma, int iterations, double regularization,
                  RngStream& rng) {
  if (set.empty()) throw DataError("FQI needs a non-empty trajectory set");
  return fqi_fit(make_fqi_batch(set, features, rng), num_actions, gamma, iterations,
                 regularization);
}

struct FqiOptions {
  double gamma = 0.9;
  int iterations = 10;
  double regularization = 1e-3;
};

/// Linear FQI learner. Until it has seen data it plays uniformly at random.
template <class Env>
class FqiLearner final : public Learner<Env> {
 public:
  using Observation = typename Env::Observation;

  FqiLearner(FeatureSet<Observation> features, FqiOptions options, EpsilonSchedule epsilon)
      : features_(std::move(features)), options_(options), epsilon_(epsilon),
        model_(Env::kNumActions, features_.dimension(), options.regularization,
               options.iterations) {
    check_discount(options.gamma);
    if (options.iterations < 1) throw ConfigError("FQI needs at least one iteration");
    if (!(options.regularization >= 0.0)) throw ConfigError("FQI regularization must be >= 0");
  }

  int act(std::span<const Triplet<Observation>>, const Observation& obs, ExplorationClock clock,
          bool explore, RngStream& rng) const override {
    if (!trained_) return static_cast<int>(rng.uniform_index(Env::kNumActions));
    std::array<double, Env::kNumActions> q{};
    std::vector<double> phi(features_.dimension());
    features_.evaluate(obs, rng, phi);
    model_.values(phi, q);
    const double eps = explore ? epsilon_.at(clock) : 0.0;
    return epsilon_greedy(q, eps, rng);
  }

  std::string snapshot() const override { return model_.serialize(trained_); }

  std::unique_ptr<Learner<Env>> clone() const override {
    return std::make_unique<FqiLearner>(*this);
  }

  const LinearQ& model() const noexcept { return model_; }
  const FeatureSet<Observation>& features() const noexcept { return features_; }
  bool trained() const noexcept { return trained_; }

 protected:
  void do_retrain(const TrajectorySet<Observation>& data, RngStream& rng) override {
    if (data.empty()) {
      trained_ = false;
      model_ = LinearQ(Env::kNumActions, features_.dimension(), options_.regularization,
                       options_.iterations);
      return;
    }
    model_ = fqi_train(data, features_, Env::kNumActions, options_.gamma, options_.iterations,
                       options_.regularization, rng);
    trained_ = true;
  }

 private:
  FeatureSet<Observation> features_;
  FqiOptions options_;
  EpsilonSchedule epsilon_;
  LinearQ model_;
  bool trained_ = false;
};

/// A frozen greedy policy: never explores, never learns.
template <class Env>
class ConstantLearner final : public Learner<Env> {
 public:
  using Observation = typename Env::Observation;

  ConstantLearner(FeatureSet<Observation> features, LinearQ model, double declared_mean = 0.0)
      : features_(std::move(features)), model_(std::move(model)), declared_mean_(declared_mean) {
    if (model_.dimension != features_.dimension() || model_.actions != Env::kNumActions) {
      throw ConfigError("constant policy parameters do not match feature set " + features_.name());
    }
  }

  int act(std::span<const Triplet<Observation>>, const Observation& obs, ExplorationClock,
          bool, RngStream& rng) const override {
    std::array<double, Env::kNumActions> q{};
    std::vector<double> phi(features_.dimension());
    features_.evaluate(obs, rng, phi);
    model_.values(phi, q);
    return greedy_action(q);
  }

  std::string snapshot() const override { return model_.serialize(); }

  std::unique_ptr<Learner<Env>> clone() const override {
    return std::make_unique<ConstantLearner>(*this);
  }

  double declared_mean() const noexcept { return declared_mean_; }
  const LinearQ& model() const noexcept { return model_; }

 protected:
  void do_retrain(const TrajectorySet<Observation>&, RngStream&) override {}

 private:
  FeatureSet<Observation> features_;
  LinearQ model_;
  double declared_mean_;
};

}  // namespace esbas
