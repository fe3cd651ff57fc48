#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "esbas/core/errors.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"
#include "esbas/envs/step.hpp"

namespace esbas {

inline constexpr int kFruitCount = 4;
inline constexpr std::uint8_t kAllFruits = (1u << kFruitCount) - 1;

enum class Move : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

/// Grid layout. ASCII format, one row per line:
///   '#' wall   '.' free   'F' fruit (free)   'S' start (free)
/// Exactly four fruits and at least one start are required; the first start
/// in reading order is used.
class GridMap {
 public:
  static GridMap parse(std::string_view text) {
    GridMap map;
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back(line);
    }
    if (rows.empty()) throw ConfigError("gridworld map is empty");
    map.rows_ = static_cast<int>(rows.size());
    map.cols_ = static_cast<int>(rows[0].size());
    map.cell_to_position_.assign(static_cast<std::size_t>(map.rows_ * map.cols_), -1);
    int fruits = 0;
    for (int r = 0; r < map.rows_; ++r) {
      if (static_cast<int>(rows[r].size()) != map.cols_) {
        throw ConfigError("gridworld map rows must all have the same width");
      }
      for (int c = 0; c < map.cols_; ++c) {
        const char ch = rows[r][c];
        if (ch == '#') continue;
        if (ch != '.' && ch != 'F' && ch != 'S') {
          throw ConfigError(std::string("unexpected character in gridworld map: ") + ch);
        }
        const int pos = static_cast<int>(map.cells_.size());
        map.cells_.push_back({r, c});
        map.cell_to_position_[static_cast<std::size_t>(r * map.cols_ + c)] = pos;
        if (ch == 'F') {
          if (fruits == kFruitCount) throw ConfigError("gridworld map must hold exactly 4 fruits");
          map.fruits_[fruits++] = pos;
        } else if (ch == 'S' && map.start_ < 0) {
          map.start_ = pos;
        }
      }
    }
    if (fruits != kFruitCount) throw ConfigError("gridworld map must hold exactly 4 fruits");
    if (map.start_ < 0) throw ConfigError("gridworld map needs a start cell");
    return map;
  }

  static GridMap load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open gridworld map: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  // 5x5 ring of corridors plus a spur down to the centre start cell:
  // 18 free positions, one fruit in each corner.
  static GridMap default_map() {
    return parse(
        "F...F\n"
        ".#.#.\n"
        ".#S#.\n"
        ".###.\n"
        "F...F\n");
  }

  std::string render() const {
    std::string out;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        const int pos = cell_to_position_[static_cast<std::size_t>(r * cols_ + c)];
        out += pos < 0 ? '#' : pos == start_ ? 'S' : fruit_at(pos) >= 0 ? 'F' : '.';
      }
      out += '\n';
    }
    return out;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int positions() const noexcept { return static_cast<int>(cells_.size()); }
  int start() const noexcept { return start_; }
  const std::array<int, kFruitCount>& fruits() const noexcept { return fruits_; }

  // Fruit index at a position, or -1.
  int fruit_at(int position) const noexcept {
    for (int f = 0; f < kFruitCount; ++f) {
      if (fruits_[f] == position) return f;
    }
    return -1;
  }

  // Position after a move; walls and borders leave it unchanged.
  int neighbour(int position, Move move) const noexcept {
    auto [r, c] = cells_[static_cast<std::size_t>(position)];
    switch (move) {
      case Move::kNorth: --r; break;
      case Move::kEast: ++c; break;
      case Move::kSouth: ++r; break;
      case Move::kWest: --c; break;
    }
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return position;
    const int next = cell_to_position_[static_cast<std::size_t>(r * cols_ + c)];
    return next < 0 ? position : next;
  }

 private:
  struct Cell {
    int row;
    int col;
  };

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
  std::vector<int> cell_to_position_;
  std::array<int, kFruitCount> fruits_{};
  int start_ = -1;
};

struct GridObservation {
  int position = 0;
  std::uint8_t fruits = kAllFruits;  // bit f set while fruit f is uncollected
  int step = 0;

  std::size_t state_id() const noexcept {
    return static_cast<std::size_t>(position) * (1u << kFruitCount) + fruits;
  }
  friend bool operator==(const GridObservation&, const GridObservation&) = default;
};

struct GridworldConfig {
  GridMap map = GridMap::default_map();
  double noise_std = 1.0;  // white noise on every reward
  int max_steps = 100;
  double timeout_objective = 200.0;
  double gamma = 0.95;

  void validate() const {
    if (!(noise_std >= 0.0)) throw ConfigError("gridworld noise deviation must be >= 0");
    if (max_steps < 1) throw ConfigError("gridworld max_steps must be >= 1");
    check_discount(gamma);
  }
};

/// Fruit collection task: eat the four corner fruits as fast as possible.
/// Reward mean is 1 when a fruit is eaten and 0 otherwise, plus Gaussian
/// noise; the bandit objective is the number of steps needed (or the timeout
/// value when the step limit hits first).
class Gridworld {
 public:
  using Observation = GridObservation;
  static constexpr int kNumActions = 4;
  static constexpr bool kBanditUsesObjective = true;

  explicit Gridworld(GridworldConfig config = {}) : config_(std::move(config)) {
    config_.validate();
  }

  Observation reset(RngStream&) {
    obs_ = {config_.map.start(), kAllFruits, 0};
    const int f = config_.map.fruit_at(obs_.position);
    if (f >= 0) obs_.fruits &= static_cast<std::uint8_t>(~(1u << f));
    done_ = obs_.fruits == 0;
    return obs_;
  }

  StepResult<Observation> step(int action, RngStream& rng) {
    if (done_) throw EnvironmentError("gridworld step after the end of the episode");
    if (action < 0 || action >= kNumActions) {
      throw EnvironmentError("gridworld action out of range: " + std::to_string(action));
    }
    StepResult<Observation> result;
    obs_.position = config_.map.neighbour(obs_.position, static_cast<Move>(action));
    ++obs_.step;
    double mean = 0.0;
    const int f = config_.map.fruit_at(obs_.position);
    if (f >= 0 && (obs_.fruits & (1u << f))) {
      obs_.fruits &= static_cast<std::uint8_t>(~(1u << f));
      mean = 1.0;
    }
    result.reward = config_.noise_std > 0.0 ? rng.normal(mean, config_.noise_std) : mean;
    if (obs_.fruits == 0) {
      done_ = true;
      result.done = true;
    } else if (obs_.step >= config_.max_steps) {
      done_ = true;
      result.done = true;
      result.truncated = true;
    }
    result.observation = obs_;
    return result;
  }

  std::size_t state_count() const noexcept {
    return static_cast<std::size_t>(config_.map.positions()) * (1u << kFruitCount);
  }

  // Steps taken when every fruit was eaten, the timeout value otherwise.
  double objective(const Trajectory<Observation>& episode, double /*ret*/) const {
    return collected_all(episode) ? static_cast<double>(episode.size()) : config_.timeout_objective;
  }
  // The bandit maximises, the objective is a duration.
  double bandit_reward(double /*ret*/, double objective) const { return -objective; }

  RewardRange reward_range() const { return {0.0, 1.0}; }
  double gamma() const noexcept { return config_.gamma; }
  const GridworldConfig& config() const noexcept { return config_; }
  const Observation& observation() const noexcept { return obs_; }

  // Episodes only end early by eating the last fruit; a cut-off episode timed out.
  static bool collected_all(const Trajectory<Observation>& episode) {
    return !episode.cutoff_observation;
  }

 private:
  GridworldConfig config_;
  Observation obs_;
  bool done_ = true;
};

/// Every (position, fruit flags) pair with at least one fruit left: the
/// non-terminal state space.
std::vector<GridObservation> enumerate_states(const GridMap& map);

/// Non-terminal states reachable from the start cell.
std::vector<GridObservation> reachable_states(const GridMap& map);

/// Length of the shortest move sequence eating every fruit from the start
/// (breadth-first search over positions x fruit flags); nullopt if impossible.
std::optional<int> shortest_collection_tour(const GridMap& map);

}  // namespace esbas
