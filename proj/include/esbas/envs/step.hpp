#pragma once

namespace esbas {

template <class Obs>
struct StepResult {
  Obs observation;
  double reward = 0.0;
  bool done = false;
  // Ended by a step limit rather than a terminal state.
  bool truncated = false;
  // The action was not legal in the state and was treated as a no-op end.
  bool invalid_action = false;
};

struct RewardRange {
  double min = 0.0;
  double max = 0.0;
};

}  // namespace esbas
