#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "esbas/core/portfolio.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"

using namespace esbas;

namespace {

Trajectory<int> episode_of(std::size_t controller, std::vector<double> rewards = {1.0}) {
  Trajectory<int> t;
  for (double r : rewards) t.triplets.push_back({0, 0, r});
  t.controller = controller;
  return t;
}

Portfolio two_members() {
  return Portfolio({{"a", LearnerKind::kFittedQ, {}, false}, {"b", LearnerKind::kFittedQ, {}, false}});
}

}  // namespace

TEST(RngStream, SameKeyGivesSameSequence) {
  RngStream a(7, "environment", 3);
  RngStream b(7, "environment", 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, LabelIndexAndSeedSeparateStreams) {
  const auto first = [](RngStream s) { return s(); };
  std::set<std::uint64_t> seen{first(RngStream(7, "environment", 3)), first(RngStream(7, "environment", 4)),
                               first(RngStream(7, "learner-act-0", 3)), first(RngStream(8, "environment", 3))};
  EXPECT_EQ(seen.size(), 4u);
}

TEST(RngStream, RunSeedsPairByRun) {
  const RunSeeds r0{1, 0};
  const RunSeeds r0_again{1, 0};
  const RunSeeds r1{1, 1};
  auto a = r0.stream("environment", 5);
  auto b = r0_again.stream("environment", 5);
  auto c = r1.stream("environment", 5);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
}

TEST(RngStream, UniformMomentsAndRange) {
  RngStream rng(42, "test");
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(RngStream, UniformIndexCoversRangeEvenly) {
  RngStream rng(1, "index");
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto k = rng.uniform_index(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

TEST(RngStream, NormalMoments) {
  RngStream rng(3, "normal");
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(1.0, 2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 1.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 2.0, 0.02);
}

TEST(RngStream, CountsDraws) {
  RngStream rng(0, "x");
  rng();
  rng.uniform();
  EXPECT_EQ(rng.draws(), 2u);
}

TEST(ComputeReturn, Examples) {
  EXPECT_EQ(compute_return(std::vector<double>{}, 0.9), 0.0);
  EXPECT_EQ(compute_return(std::vector<double>{2.0}, 0.9), 2.0);
  EXPECT_DOUBLE_EQ(compute_return(std::vector<double>{1.0, 1.0}, 0.9), 1.9);
}

TEST(ComputeReturn, TrajectoryOverloadAgrees) {
  const auto t = episode_of(0, {0.5, -1.0, 2.0});
  EXPECT_DOUBLE_EQ(compute_return(t, 0.8), compute_return(std::vector<double>{0.5, -1.0, 2.0}, 0.8));
  EXPECT_DOUBLE_EQ(compute_return(t, 0.8), 0.5 - 0.8 + 0.64 * 2.0);
}

TEST(ComputeReturn, RejectsBadDiscount) {
  EXPECT_THROW(compute_return(std::vector<double>{1.0}, 1.0), ConfigError);
  EXPECT_THROW(compute_return(std::vector<double>{1.0}, -0.1), ConfigError);
}

TEST(TrajectorySet, AppendStampsMetaTime) {
  TrajectorySet<int> set;
  for (int i = 0; i < 5; ++i) set.append(episode_of(0, {1.0, 2.0}));
  ASSERT_EQ(set.size(), 5u);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set[i].meta_time, static_cast<std::int64_t>(i) + 1);
  EXPECT_EQ(set.transition_count(), 10u);
}

TEST(SubTrajectories, FilterByController) {
  const auto portfolio = two_members();
  TrajectorySet<int> set;
  set.append(episode_of(0));
  set.append(episode_of(1));
  set.append(episode_of(0));
  const auto view = sub_trajectories(set, portfolio, "a");
  ASSERT_EQ(view.size(), 2u);
  EXPECT_EQ(view[0].get().meta_time, 1);
  EXPECT_EQ(view[1].get().meta_time, 3);
}

TEST(SubTrajectories, NoMatchesGivesEmptyView) {
  const auto portfolio = two_members();
  TrajectorySet<int> set;
  set.append(episode_of(1));
  set.append(episode_of(1));
  EXPECT_TRUE(sub_trajectories(set, portfolio, "a").empty());
}

TEST(SubTrajectories, RoundRobinOfSevenGivesFourForFirst) {
  const auto portfolio = two_members();
  TrajectorySet<int> set;
  for (std::size_t i = 0; i < 7; ++i) set.append(episode_of(i % 2));
  EXPECT_EQ(sub_trajectories(set, portfolio, "a").size(), 4u);
  EXPECT_EQ(sub_trajectories(set, portfolio, "b").size(), 3u);
}

TEST(SubTrajectories, ControllersPartitionTheSet) {
  const Portfolio portfolio({{"a", LearnerKind::kFittedQ, {}, false},
                             {"b", LearnerKind::kFittedQ, {}, false},
                             {"c", LearnerKind::kConstant, {}, true}});
  RngStream rng(5, "controllers");
  TrajectorySet<int> set;
  for (int i = 0; i < 300; ++i) set.append(episode_of(rng.uniform_index(3)));
  std::size_t total = 0;
  for (const auto& id : portfolio.ids()) total += sub_trajectories(set, portfolio, id).size();
  EXPECT_EQ(total, set.size());
}

TEST(SubTrajectories, UnknownIdThrows) {
  TrajectorySet<int> set;
  EXPECT_THROW(sub_trajectories(set, two_members(), "zz"), LookupError);
}

TEST(Portfolio, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Portfolio({}), ConfigError);
  EXPECT_THROW(Portfolio({{"a", LearnerKind::kFittedQ, {}, false}, {"a", LearnerKind::kQLearning, {}, false}}),
               ConfigError);
}

TEST(Portfolio, IndexLookup) {
  const auto p = two_members();
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.index_of("b"), 1u);
  EXPECT_EQ(p.ids(), (std::vector<std::string>{"a", "b"}));
}
