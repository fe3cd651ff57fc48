#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>

#include "esbas/bandit/ucb1.hpp"

namespace esbas {

struct WindowEntry {
  std::int64_t meta_time = 0;
  std::size_t arm = 0;
  double value = 0.0;
};

// Number of most recent selections the bandit may look at when choosing for
// meta-time tau: floor(tau / 2), never less than one.
inline std::size_t window_capacity(std::int64_t tau) {
  return static_cast<std::size_t>(std::max<std::int64_t>(1, tau / 2));
}

/// Ordered (meta-time, arm, objective) history of past selections.
class SelectionWindow {
 public:
  void push(WindowEntry entry) {
    if (!entries_.empty() && entry.meta_time <= entries_.back().meta_time) {
      throw DataError("selection window entries must have strictly increasing meta-time");
    }
    entries_.push_back(entry);
  }

  void truncate(std::size_t capacity) {
    while (entries_.size() > capacity) entries_.pop_front();
  }

  const std::deque<WindowEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::deque<WindowEntry> entries_;
};

/// Bandit statistics rebuilt from scratch over the last window_capacity(tau)
/// entries of `window`.
inline BanditState rebuild_window_state(const SelectionWindow& window, std::int64_t tau,
                                        std::size_t arms, double xi) {
  BanditState state(arms, xi);
  const auto& entries = window.entries();
  const std::size_t keep = std::min(entries.size(), window_capacity(tau));
  std::vector<double> sums(arms, 0.0);
  for (std::size_t i = entries.size() - keep; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.arm >= arms) throw LookupError("window entry arm out of range: " + std::to_string(e.arm));
    sums[e.arm] += e.value;
    ++state.counts[e.arm];
    ++state.total;
  }
  for (std::size_t k = 0; k < arms; ++k) {
    if (state.counts[k] > 0) state.means[k] = sums[k] / static_cast<double>(state.counts[k]);
  }
  return state;
}

// Truncates the window for meta-time tau and applies UCB1 on what is left.
inline std::size_t window_select(SelectionWindow& window, std::int64_t tau, std::size_t arms,
                                 double xi) {
  if (tau < 1) throw ConfigError("meta-time must be >= 1");
  window.truncate(window_capacity(tau));
  return ucb1_select(rebuild_window_state(window, tau, arms, xi));
}

/// Sliding-window UCB1 with O(1) amortised selection. Keeps per-arm running
/// sums next to the window so each step only touches the entries that enter
/// or leave it; `window_select` is the from-scratch reference.
class SlidingWindowBandit {
 public:
  SlidingWindowBandit(std::size_t arms, double xi) : state_(arms, xi), sums_(arms, 0.0) {}

  std::size_t select(std::int64_t tau) {
    if (tau < 1) throw ConfigError("meta-time must be >= 1");
    shrink_to(window_capacity(tau));
    return ucb1_select(state_);
  }

  void record(std::int64_t tau, std::size_t arm, double value) {
    if (arm >= state_.arms()) throw LookupError("window arm out of range: " + std::to_string(arm));
    if (!std::isfinite(value)) throw DataError("window objective must be finite");
    window_.push({tau, arm, value});
    sums_[arm] += value;
    ++state_.counts[arm];
    ++state_.total;
    refresh_mean(arm);
  }

  // Statistics as of the last select() call.
  const BanditState& state() const noexcept { return state_; }
  const SelectionWindow& window() const noexcept { return window_; }

 private:
  void shrink_to(std::size_t capacity) {
    while (window_.size() > capacity) {
      const WindowEntry oldest = window_.entries().front();
      window_.truncate(window_.size() - 1);
      sums_[oldest.arm] -= oldest.value;
      --state_.counts[oldest.arm];
      --state_.total;
      refresh_mean(oldest.arm);
    }
  }

  void refresh_mean(std::size_t arm) {
    if (state_.counts[arm] == 0) {
      sums_[arm] = 0.0;
      state_.means[arm] = 0.0;
    } else {
      state_.means[arm] = sums_[arm] / static_cast<double>(state_.counts[arm]);
    }
  }

  BanditState state_;
  std::vector<double> sums_;
  SelectionWindow window_;
};

}  // namespace esbas
