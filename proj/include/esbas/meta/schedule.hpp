#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "esbas/core/errors.hpp"

namespace esbas {

/// Partition of meta-time into epochs.
///
/// power-of-two: epoch b covers meta-times [2^b, 2^(b+1) - 1], unbounded.
/// custom:       consecutive blocks of the given lengths, bounded by their sum.
class EpochSchedule {
 public:
  enum class Kind { kPowerOfTwo, kCustom };

  static EpochSchedule power_of_two() { return EpochSchedule(Kind::kPowerOfTwo, {}); }

  static EpochSchedule custom(std::vector<std::int64_t> lengths) {
    if (lengths.empty()) throw ConfigError("custom epoch schedule needs at least one epoch");
    for (auto len : lengths) {
      if (len <= 0) throw ConfigError("epoch lengths must be positive");
    }
    return EpochSchedule(Kind::kCustom, std::move(lengths));
  }

  // `repeat` epochs of `first` steps, then each epoch twice as long as the
  // previous one, `epochs` epochs in total.
  static EpochSchedule doubling(std::int64_t first, int repeat, int epochs) {
    if (first <= 0 || repeat < 1 || epochs < 1) throw ConfigError("bad doubling schedule");
    std::vector<std::int64_t> lengths;
    std::int64_t len = first;
    for (int b = 0; b < epochs; ++b) {
      if (b >= repeat) len *= 2;
      lengths.push_back(len);
    }
    return custom(std::move(lengths));
  }

  // Fixed-size blocks covering [1, total]; the last block may be shorter.
  static EpochSchedule uniform(std::int64_t block, std::int64_t total) {
    if (block <= 0 || total <= 0) throw ConfigError("bad uniform schedule");
    std::vector<std::int64_t> lengths;
    for (std::int64_t done = 0; done < total; done += block) lengths.push_back(std::min(block, total - done));
    return custom(std::move(lengths));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::int64_t>& lengths() const noexcept { return lengths_; }

  // Total meta-time covered, or -1 when unbounded.
  std::int64_t total() const noexcept { return kind_ == Kind::kPowerOfTwo ? -1 : starts_.back() - 1; }

  bool covers(std::int64_t tau) const noexcept {
    return tau >= 1 && (kind_ == Kind::kPowerOfTwo || tau <= total());
  }

  int epoch_of(std::int64_t tau) const {
    if (!covers(tau)) throw ConfigError("meta-time " + std::to_string(tau) + " outside the epoch schedule");
    if (kind_ == Kind::kPowerOfTwo) return std::bit_width(static_cast<std::uint64_t>(tau)) - 1;
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), tau);
    return static_cast<int>(it - starts_.begin()) - 1;
  }

  std::int64_t epoch_start(int epoch) const {
    if (kind_ == Kind::kPowerOfTwo) return std::int64_t{1} << epoch;
    return starts_.at(static_cast<std::size_t>(epoch));
  }

  std::int64_t epoch_length(int epoch) const {
    if (kind_ == Kind::kPowerOfTwo) return std::int64_t{1} << epoch;
    return lengths_.at(static_cast<std::size_t>(epoch));
  }

  // Number of epochs touched by meta-times 1..T.
  int epochs_until(std::int64_t T) const { return epoch_of(T) + 1; }

  std::string describe() const {
    if (kind_ == Kind::kPowerOfTwo) return "power-of-two";
    std::string out = "custom:";
    for (std::size_t i = 0; i < lengths_.size(); ++i) {
      out += (i ? "," : "") + std::to_string(lengths_[i]);
    }
    return out;
  }

 private:
  EpochSchedule(Kind kind, std::vector<std::int64_t> lengths) : kind_(kind), lengths_(std::move(lengths)) {
    starts_.push_back(1);
    for (auto len : lengths_) starts_.push_back(starts_.back() + len);
  }

  Kind kind_;
  std::vector<std::int64_t> lengths_;
  std::vector<std::int64_t> starts_;  // starts_[b] = first meta-time of epoch b
};

}  // namespace esbas
