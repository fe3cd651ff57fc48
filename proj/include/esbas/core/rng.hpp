#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace esbas {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used to turn stream labels into key material.
inline constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based random stream.
///
/// The n-th output is a pure function of (master seed, label, index, n), so
/// every consumer (environment, bandit, learner-k, harness) draws from its own
/// substream and adding a consumer never shifts the numbers another one sees.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::string_view label, std::uint64_t index = 0) noexcept
      : key_(splitmix64(splitmix64(master_seed ^ hash_label(label)) ^ splitmix64(index))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return splitmix64(key_ + kGoldenGamma * counter_++); }

  // Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Box-Muller; one draw per call so the call sequence stays easy to replay.
  double normal(double mean, double stddev) noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Seeds of one run. Substreams are derived from (master, run) so paired runs of
/// different meta-algorithms see the same environment randomness.
struct RunSeeds {
  std::uint64_t master = 0;
  std::uint64_t run = 0;

  RngStream stream(std::string_view label, std::uint64_t index = 0) const noexcept {
    return RngStream(splitmix64(master) ^ splitmix64(run + 0x5bd1e995ULL), label, index);
  }
};

}  // namespace esbas
