#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "esbas/bandit/sliding_window.hpp"
#include "esbas/bandit/ucb1.hpp"
#include "esbas/core/rng.hpp"

using namespace esbas;

namespace {

BanditState state_of(std::vector<double> means, std::vector<std::int64_t> counts, double xi = 0.25) {
  BanditState s(means.size(), xi);
  s.means = std::move(means);
  s.counts = std::move(counts);
  s.total = std::accumulate(s.counts.begin(), s.counts.end(), std::int64_t{0});
  return s;
}

// Independent evaluation of the index with the natural logarithm.
double index_oracle(double mean, double n_k, double n, double xi) { return mean + std::sqrt(xi * std::log(n) / n_k); }

}  // namespace

TEST(Ucb1Select, HigherMeanWinsAtEqualCounts) {
  const auto s = state_of({0.5, 0.6}, {10, 10});
  EXPECT_NEAR(ucb1_score(s, 0), index_oracle(0.5, 10, 20, 0.25), 1e-12);
  EXPECT_NEAR(ucb1_score(s, 0), 0.7737, 1e-4);
  EXPECT_NEAR(ucb1_score(s, 1), 0.8737, 1e-4);
  EXPECT_EQ(ucb1_select(s), 1u);
}

TEST(Ucb1Select, UnpulledArmFirst) {
  EXPECT_EQ(ucb1_select(state_of({0.0, 3.0}, {0, 5})), 0u);
  EXPECT_EQ(ucb1_select(state_of({3.0, 0.0, 0.0}, {5, 0, 0})), 1u);
}

TEST(Ucb1Select, ExactTieGoesToLowestIndex) {
  EXPECT_EQ(ucb1_select(state_of({0.4, 0.4}, {8, 8})), 0u);
}

TEST(Ucb1Select, MatchesBruteForceArgmax) {
  RngStream rng(11, "ucb-prop");
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t K = 2 + rng.uniform_index(5);
    std::vector<double> means(K);
    std::vector<std::int64_t> counts(K);
    for (std::size_t k = 0; k < K; ++k) {
      means[k] = rng.uniform() * 2.0 - 1.0;
      counts[k] = 1 + static_cast<std::int64_t>(rng.uniform_index(50));
    }
    const auto s = state_of(means, counts);
    std::size_t best = 0;
    double best_score = -1e300;
    for (std::size_t k = 0; k < K; ++k) {
      const double v = index_oracle(means[k], static_cast<double>(counts[k]), static_cast<double>(s.total), 0.25);
      if (v > best_score) {
        best_score = v;
        best = k;
      }
    }
    ASSERT_EQ(ucb1_select(s), best);
  }
}

TEST(Ucb1Select, RejectsBadXi) {
  EXPECT_THROW(BanditState(2, 0.0), ConfigError);
  EXPECT_THROW(BanditState(2, -1.0), ConfigError);
}

TEST(Ucb1Update, Examples) {
  auto s = state_of({0.5, 0.0}, {1, 0});
  ucb1_update(s, 0, 1.0);
  EXPECT_DOUBLE_EQ(s.means[0], 0.75);
  EXPECT_EQ(s.counts[0], 2);

  auto fresh = state_of({0.0, 0.0}, {0, 0});
  ucb1_update(fresh, 0, -0.3);
  EXPECT_DOUBLE_EQ(fresh.means[0], -0.3);
  EXPECT_EQ(fresh.counts[0], 1);
}

TEST(Ucb1Update, MeanOfHundredRewards) {
  BanditState s(1, 0.25);
  RngStream rng(9, "rewards");
  std::vector<double> rewards;
  for (int i = 0; i < 100; ++i) {
    rewards.push_back(rng.normal(0.3, 2.0));
    ucb1_update(s, 0, rewards.back());
  }
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / 100.0;
  EXPECT_NEAR(s.means[0], mean, 1e-9 * std::max(1.0, std::abs(mean)));
  EXPECT_EQ(s.counts[0], 100);
}

TEST(Ucb1Update, RejectsBadInput) {
  BanditState s(2, 0.25);
  EXPECT_THROW(ucb1_update(s, 2, 1.0), LookupError);
  EXPECT_THROW(ucb1_update(s, 0, std::nan("")), DataError);
}

TEST(Ucb1Reset, FullReset) {
  auto s = state_of({0.5, 0.7}, {3, 4});
  reset(s);
  EXPECT_EQ(s, BanditState(2, 0.25));
}

TEST(Ucb1Reset, KeptConstantArmSurvives) {
  auto s = state_of({1.0, 0.2}, {40, 7});
  reset(s, {true, false});
  EXPECT_DOUBLE_EQ(s.means[0], 1.0);
  EXPECT_EQ(s.counts[0], 40);
  EXPECT_EQ(s.counts[1], 0);
  EXPECT_EQ(s.means[1], 0.0);
  EXPECT_EQ(s.total, 40);
}

TEST(Ucb1Reset, KeepAllIsIdentity) {
  const auto before = state_of({1.0, 0.2, -3.0}, {40, 7, 1});
  auto s = before;
  reset(s, {true, true, true});
  EXPECT_EQ(s, before);
}

// Random updates and resets against a stored reward list per arm.
TEST(Ucb1Property, ConservationAndMeanCorrectness) {
  RngStream rng(21, "ucb-updates");
  const std::size_t K = 4;
  BanditState s(K, 0.25);
  std::vector<std::vector<double>> credited(K);
  for (int step = 0; step < 5000; ++step) {
    if (rng.uniform() < 0.01) {
      std::vector<bool> keep(K);
      for (std::size_t k = 0; k < K; ++k) keep[k] = rng.bernoulli(0.5);
      reset(s, keep);
      for (std::size_t k = 0; k < K; ++k) {
        if (!keep[k]) credited[k].clear();
      }
    } else {
      const auto arm = rng.uniform_index(K);
      const double r = rng.normal(0.0, 5.0);
      ucb1_update(s, arm, r);
      credited[arm].push_back(r);
    }
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
      sum += s.counts[k];
      ASSERT_EQ(s.counts[k], static_cast<std::int64_t>(credited[k].size()));
      if (credited[k].empty()) {
        ASSERT_EQ(s.means[k], 0.0);
      } else {
        const double mean = std::accumulate(credited[k].begin(), credited[k].end(), 0.0) /
                            static_cast<double>(credited[k].size());
        ASSERT_NEAR(s.means[k], mean, 1e-9 * std::max(1.0, std::abs(mean)));
      }
    }
    ASSERT_EQ(s.total, sum);
  }
}

TEST(WindowCapacity, HalfOfMetaTimeWithFloorOfOne) {
  EXPECT_EQ(window_capacity(1), 1u);
  EXPECT_EQ(window_capacity(2), 1u);
  EXPECT_EQ(window_capacity(10), 5u);
  EXPECT_EQ(window_capacity(11), 5u);
}

TEST(WindowSelect, UsesLastFiveOfEightAtTauTen) {
  SelectionWindow w;
  // The first three entries favour arm 1; the last five favour arm 0.
  const std::vector<std::pair<std::size_t, double>> entries = {
      {1, 9.0}, {1, 9.0}, {1, 9.0}, {0, 1.0}, {1, 0.0}, {0, 1.0}, {1, 0.0}, {0, 1.0}};
  for (std::size_t i = 0; i < entries.size(); ++i) w.push({static_cast<std::int64_t>(i + 1), entries[i].first, entries[i].second});
  const auto state = rebuild_window_state(w, 10, 2, 0.25);
  EXPECT_EQ(state.total, 5);
  EXPECT_EQ(state.counts[0], 3);
  EXPECT_EQ(state.counts[1], 2);
  EXPECT_DOUBLE_EQ(state.means[1], 0.0);
  EXPECT_EQ(window_select(w, 10, 2, 0.25), 0u);
  EXPECT_EQ(w.size(), 5u);
}

TEST(WindowSelect, TauOneKeepsOneEntry) {
  SelectionWindow w;
  w.push({1, 0, 5.0});
  w.push({2, 0, 5.0});
  const auto state = rebuild_window_state(w, 1, 3, 0.25);
  EXPECT_EQ(state.total, 1);
  EXPECT_EQ(state.counts[1], 0);
  EXPECT_EQ(window_select(w, 1, 3, 0.25), 1u);
}

TEST(WindowSelect, RebuiltMeanOfAlternatingValues) {
  SelectionWindow w;
  const double values[] = {0, 1, 0, 1};
  for (int i = 0; i < 4; ++i) w.push({i + 1, 0, values[i]});
  const auto state = rebuild_window_state(w, 8, 2, 0.25);
  EXPECT_DOUBLE_EQ(state.means[0], 0.5);
  EXPECT_EQ(state.counts[0], 4);
}

TEST(SelectionWindow, RejectsNonIncreasingMetaTime) {
  SelectionWindow w;
  w.push({3, 0, 1.0});
  EXPECT_THROW(w.push({3, 0, 1.0}), DataError);
}

// The incremental bandit against a from-scratch recomputation at every step.
TEST(SlidingWindowBandit, MatchesBruteForceEveryStep) {
  const std::size_t K = 3;
  SlidingWindowBandit bandit(K, 0.25);
  std::vector<WindowEntry> history;
  RngStream rng(4, "window");
  const double arm_mean[] = {-20.0, -25.0, -60.0};
  for (std::int64_t tau = 1; tau <= 3000; ++tau) {
    const auto arm = bandit.select(tau);
    const std::size_t capacity = window_capacity(tau);
    BanditState oracle(K, 0.25);
    std::vector<double> sums(K, 0.0);
    const std::size_t first = history.size() > capacity ? history.size() - capacity : 0;
    for (std::size_t i = first; i < history.size(); ++i) {
      sums[history[i].arm] += history[i].value;
      ++oracle.counts[history[i].arm];
      ++oracle.total;
    }
    for (std::size_t k = 0; k < K; ++k) {
      ASSERT_EQ(bandit.state().counts[k], oracle.counts[k]) << "tau " << tau;
      if (oracle.counts[k] > 0) oracle.means[k] = sums[k] / static_cast<double>(oracle.counts[k]);
      ASSERT_NEAR(bandit.state().means[k], oracle.means[k], 1e-9 * std::max(1.0, std::abs(oracle.means[k])));
    }
    ASSERT_EQ(bandit.state().total, oracle.total);
    ASSERT_EQ(arm, ucb1_select(oracle)) << "tau " << tau;
    const double value = std::round(rng.normal(arm_mean[arm], 10.0));
    bandit.record(tau, arm, value);
    history.push_back({tau, arm, value});
  }
}
