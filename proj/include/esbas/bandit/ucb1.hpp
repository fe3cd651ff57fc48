#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "esbas/core/errors.hpp"

namespace esbas {

/// Statistics of a K-armed UCB1 bandit: per-arm empirical means and pull
/// counts, total pulls, and the exploration parameter xi.
struct BanditState {
  std::vector<double> means;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  double xi = 0.25;

  BanditState() = default;
  BanditState(std::size_t arms, double xi_) : means(arms, 0.0), counts(arms, 0), xi(xi_) {
    if (!(xi_ > 0.0) || !std::isfinite(xi_)) {
      throw ConfigError("UCB parameter xi must be positive, got " + std::to_string(xi_));
    }
  }

  std::size_t arms() const noexcept { return means.size(); }

  friend bool operator==(const BanditState&, const BanditState&) = default;
};

// Optimistic index x^k + sqrt(xi ln(n) / n^k) of a pulled arm.
inline double ucb1_score(const BanditState& state, std::size_t arm) {
  const double n = static_cast<double>(state.total);
  return state.means[arm] +
         std::sqrt(state.xi * std::log(n) / static_cast<double>(state.counts[arm]));
}

/// Arm to pull next: the lowest-index unpulled arm if any, otherwise the
/// argmax of the UCB1 index with ties going to the lowest index.
inline std::size_t ucb1_select(const BanditState& state) {
  if (state.arms() == 0) throw ConfigError("bandit has no arms");
  for (std::size_t k = 0; k < state.arms(); ++k) {
    if (state.counts[k] == 0) return k;
  }
  std::size_t best = 0;
  double best_score = ucb1_score(state, 0);
  for (std::size_t k = 1; k < state.arms(); ++k) {
    const double score = ucb1_score(state, k);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

inline void ucb1_update(BanditState& state, std::size_t arm, double reward) {
  if (arm >= state.arms()) throw LookupError("bandit arm out of range: " + std::to_string(arm));
  if (!std::isfinite(reward)) throw DataError("bandit reward must be finite");
  const auto n = ++state.counts[arm];
  state.means[arm] += (reward - state.means[arm]) / static_cast<double>(n);
  ++state.total;
}

/// Zeroes every arm whose flag in `keep` is false; kept arms retain their
/// statistics. `keep` may be empty (full reset).
inline void reset(BanditState& state, const std::vector<bool>& keep = {}) {
  state.total = 0;
  for (std::size_t k = 0; k < state.arms(); ++k) {
    const bool kept = k < keep.size() && keep[k];
    if (!kept) {
      state.means[k] = 0.0;
      state.counts[k] = 0;
    }
    state.total += state.counts[k];
  }
}

}  // namespace esbas
