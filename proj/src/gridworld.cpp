#include "esbas/envs/gridworld.hpp"
#include <queue>

namespace esbas {

std::vector<GridObservation> enumerate_states(const GridMap& map) {
  std::vector<GridObservation> states;
  for (int p = 0; p < map.positions(); ++p) {
    for (std::uint8_t flags = 1; flags <= kAllFruits; ++flags) states.push_back({p, flags, 0});
  }
  return states;
}

std::vector<GridObservation> reachable_states(const GridMap& map) {
  const std::size_t stride = 1u << kFruitCount;
  std::vector<bool> seen(static_cast<std::size_t>(map.positions()) * stride, false);
  std::vector<GridObservation> out;
  std::queue<GridObservation> frontier;
  GridObservation start{map.start(), kAllFruits, 0};
  if (const int f = map.fruit_at(start.position); f >= 0) start.fruits &= ~(1u << f);
  if (start.fruits == 0) return out;
  frontier.push(start);
  seen[start.state_id()] = true;
  while (!frontier.empty()) {
    const auto s = frontier.front();
    frontier.pop();
    out.push_back(s);
    for (int a = 0; a < Gridworld::kNumActions; ++a) {
      GridObservation n{map.neighbour(s.position, static_cast<Move>(a)), s.fruits, 0};
      if (const int f = map.fruit_at(n.position); f >= 0) n.fruits &= ~(1u << f);
      if (n.fruits == 0 || seen[n.state_id()]) continue;
      seen[n.state_id()] = true;
      frontier.push(n);
    }
  }
  return out;
}

std::optional<int> shortest_collection_tour(const GridMap& map) {
  const std::size_t stride = 1u << kFruitCount;
  std::vector<int> dist(static_cast<std::size_t>(map.positions()) * stride, -1);
  GridObservation start{map.start(), kAllFruits, 0};
  if (const int f = map.fruit_at(start.position); f >= 0) start.fruits &= ~(1u << f);
  if (start.fruits == 0) return 0;
  std::queue<GridObservation> frontier;
  frontier.push(start);
  dist[start.state_id()] = 0;
  while (!frontier.empty()) {
    const auto s = frontier.front();
    frontier.pop();
    const int d = dist[s.state_id()];
    for (int a = 0; a < Gridworld::kNumActions; ++a) {
      GridObservation n{map.neighbour(s.position, static_cast<Move>(a)), s.fruits, 0};
      if (const int f = map.fruit_at(n.position); f >= 0) n.fruits &= ~(1u << f);
      if (n.fruits == 0) return d + 1;
      if (dist[n.state_id()] >= 0) continue;
      dist[n.state_id()] = d + 1;
      frontier.push(n);
    }
  }
  return std::nullopt;
}
}  // namespace esbas
