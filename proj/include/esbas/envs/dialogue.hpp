#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "esbas/core/errors.hpp"
#include "esbas/core/rng.hpp"
#include "esbas/core/trajectory.hpp"
#include "esbas/envs/step.hpp"

// Negotiation dialogue game: two fully empathetic players look for an
// agreement among four options over a noisy speech channel. The system is the
// RL agent; the user is a rule-based simulator.

namespace esbas {

inline constexpr int kDialogueOptions = 4;

enum class SystemAct : int { kRefInsist = 0, kRefNewProp = 1, kAskRepeat = 2, kAccept = 3, kEndDial = 4 };

inline std::string_view to_string(SystemAct act) {
  switch (act) {
    case SystemAct::kRefInsist: return "RefInsist";
    case SystemAct::kRefNewProp: return "RefNewProp";
    case SystemAct::kAskRepeat: return "AskRepeat";
    case SystemAct::kAccept: return "Accept";
    case SystemAct::kEndDial: return "EndDial";
  }
  return "?";
}

using OptionCosts = std::array<double, kDialogueOptions>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Speech recognition between two players. With probability `ser` the
/// listener hears a uniformly drawn wrong option; the confidence score is
/// sigmoid(X), X ~ N(1, score_std) when heard right and N(0, score_std) otherwise.
struct AsrChannel {
  double ser = 0.3;
  double score_std = 0.2;

  struct Heard {
    int option = -1;
    double score = 0.0;
    bool correct = true;
  };

  Heard transmit(int option, RngStream& rng) const {
    Heard h{option, 0.0, true};
    if (ser > 0.0 && rng.bernoulli(ser)) {
      int wrong = static_cast<int>(rng.uniform_index(kDialogueOptions - 1));
      if (wrong >= option) ++wrong;
      h.option = wrong;
      h.correct = false;
    }
    h.score = score(h.correct, rng);
    return h;
  }

  double score(bool correct, RngStream& rng) const {
    return sigmoid(rng.normal(correct ? 1.0 : 0.0, score_std));
  }

  void validate() const {
    if (!(ser >= 0.0 && ser <= 1.0)) throw ConfigError("sentence error rate must lie in [0, 1]");
    if (!(score_std >= 0.0)) throw ConfigError("ASR score deviation must be >= 0");
  }
};

// Options sorted from cheapest to most expensive for the given player.
inline std::array<int, kDialogueOptions> preference_order(const OptionCosts& costs) {
  std::array<int, kDialogueOptions> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return costs[a] < costs[b]; });
  return order;
}

/// What the system knows when it has to act.
struct DialogueObservation {
  int turn = 1;              // RL-time of the pending system decision, 1-based
  int understood = -1;       // user proposition as heard by the system, -1 if none
  double asr_score = 0.0;    // confidence of that hearing
  int last_system_prop = -1;
  OptionCosts system_costs{};
};

// Option RefNewProp would put on the table: the system's next preferred
// option after its last proposition (wrapping), or its favourite.
inline int next_new_proposal(const DialogueObservation& obs) {
  const auto order = preference_order(obs.system_costs);
  if (obs.last_system_prop < 0) return order[0];
  const auto pos = std::find(order.begin(), order.end(), obs.last_system_prop) - order.begin();
  return order[static_cast<std::size_t>(pos + 1) % kDialogueOptions];
}

inline int insist_proposal(const DialogueObservation& obs) {
  return obs.last_system_prop >= 0 ? obs.last_system_prop : preference_order(obs.system_costs)[0];
}

// --- simulated user -------------------------------------------------------

struct UserPolicy {
  double accept_threshold = 0.35;
  int patience = 6;  // user turns before it settles for the system's offer
};

struct UserView {
  OptionCosts costs{};
  int heard_system_prop = -1;  // what the user understood the system proposed
  bool repeat_requested = false;
  int last_user_prop = -1;
  std::array<bool, kDialogueOptions> proposed{};  // options the user already put forward
  int user_turn = 1;  // index of the turn being decided, 1-based
};

struct UserAct {
  enum class Kind { kAccept, kPropose, kRepeat } kind = Kind::kPropose;
  int option = -1;
};

inline int user_counter_proposal(const UserView& view) {
  const auto order = preference_order(view.costs);
  for (int o : order) {
    if (o != view.heard_system_prop && !view.proposed[o]) return o;
  }
  for (int o : order) {
    if (o != view.heard_system_prop) return o;
  }
  return order[0];
}

/// Rule-based user. Accepts the system's offer when it is cheap enough or
/// its patience ran out, repeats on request, otherwise counter-proposes its
/// cheapest option not yet put forward.
inline UserAct simulated_user_act(const UserView& view, const UserPolicy& policy) {
  if (view.repeat_requested) {
    if (view.last_user_prop >= 0) return {UserAct::Kind::kRepeat, view.last_user_prop};
    return {UserAct::Kind::kPropose, user_counter_proposal(view)};
  }
  if (view.heard_system_prop >= 0 &&
      (view.costs[view.heard_system_prop] <= policy.accept_threshold ||
       view.user_turn > policy.patience)) {
    return {UserAct::Kind::kAccept, view.heard_system_prop};
  }
  return {UserAct::Kind::kPropose, user_counter_proposal(view)};
}

// --- environment ------------------------------------------------------------

struct DialogueConfig {
  AsrChannel system_channel{0.3, 0.2};
  AsrChannel user_channel{0.0, 0.2};
  UserPolicy user;
  int max_turns = 20;
  double gamma = 0.9;

  void validate() const {
    system_channel.validate();
    user_channel.validate();
    if (max_turns < 1) throw ConfigError("dialogue max_turns must be >= 1");
    if (user.patience < 0) throw ConfigError("user patience must be >= 0");
    check_discount(gamma);
  }
};

/// Terminal reward of the system when the system settled on `system_option`
/// and the user on `user_option`.
inline double agreement_reward(const OptionCosts& system_costs, const OptionCosts& user_costs,
                               int system_option, int user_option) {
  if (system_option == user_option) {
    return 2.0 - system_costs[system_option] - user_costs[user_option];
  }
  return -system_costs[system_option] - user_costs[user_option];
}

class DialogueEnv {
 public:
  using Observation = DialogueObservation;
  static constexpr int kNumActions = 5;
  static constexpr bool kBanditUsesObjective = false;

  explicit DialogueEnv(DialogueConfig config = {}) : config_(config) { config_.validate(); }

  Observation reset(RngStream& rng) {
    for (auto& c : obs_.system_costs) c = rng.uniform();
    for (auto& c : user_costs_) c = rng.uniform();
    obs_.turn = 1;
    obs_.understood = -1;
    obs_.asr_score = 0.0;
    obs_.last_system_prop = -1;
    user_proposed_.fill(false);
    user_last_prop_ = -1;
    user_heard_prop_ = -1;
    user_turns_ = 0;
    done_ = false;
    if (rng.bernoulli(0.5)) user_speaks(false, rng);
    return obs_;
  }

  StepResult<Observation> step(int action, RngStream& rng) {
    if (done_) throw EnvironmentError("dialogue step after the end of the episode");
    if (action < 0 || action >= kNumActions) {
      throw EnvironmentError("dialogue action out of range: " + std::to_string(action));
    }
    StepResult<Observation> result;
    switch (static_cast<SystemAct>(action)) {
      case SystemAct::kEndDial:
        finish(result, 0.0);
        break;
      case SystemAct::kAccept:
        if (obs_.understood < 0) {
          result.invalid_action = true;
          finish(result, 0.0);
        } else {
          finish(result, agreement_reward(obs_.system_costs, user_costs_, obs_.understood,
                                          user_last_prop_));
        }
        break;
      case SystemAct::kRefInsist:
      case SystemAct::kRefNewProp: {
        const int option = static_cast<SystemAct>(action) == SystemAct::kRefInsist
                               ? insist_proposal(obs_)
                               : next_new_proposal(obs_);
        obs_.last_system_prop = option;
        user_heard_prop_ = config_.user_channel.transmit(option, rng).option;
        if (user_speaks(false, rng)) {
          finish(result, agreement_reward(obs_.system_costs, user_costs_, option, user_heard_prop_));
        }
        break;
      }
      case SystemAct::kAskRepeat:
        user_speaks(true, rng);
        break;
    }
    if (!done_) {
      if (obs_.turn >= config_.max_turns) {
        finish(result, 0.0);
      } else {
        ++obs_.turn;
      }
    }
    result.observation = obs_;
    return result;
  }

  // The user's side of the state, for inspection.
  UserView user_view() const {
    UserView view;
    view.costs = user_costs_;
    view.heard_system_prop = user_heard_prop_;
    view.last_user_prop = user_last_prop_;
    view.proposed = user_proposed_;
    view.user_turn = user_turns_;
    return view;
  }

  const OptionCosts& user_costs() const noexcept { return user_costs_; }
  const Observation& observation() const noexcept { return obs_; }
  const DialogueConfig& config() const noexcept { return config_; }
  bool done() const noexcept { return done_; }

  static RewardRange reward_range() { return {-2.0, 2.0}; }
  double gamma() const noexcept { return config_.gamma; }

  // Objective fed to the bandit: the discounted return itself.
  double objective(const Trajectory<Observation>&, double ret) const { return ret; }
  double bandit_reward(double ret, double /*objective*/) const { return ret; }

 private:
  void finish(StepResult<Observation>& result, double reward) {
    done_ = true;
    result.done = true;
    result.reward = reward;
  }

  // Returns true when the user accepted the system's proposition.
  bool user_speaks(bool repeat_requested, RngStream& rng) {
    UserView view = user_view();
    view.repeat_requested = repeat_requested;
    view.user_turn = ++user_turns_;
    const UserAct act = simulated_user_act(view, config_.user);
    if (act.kind == UserAct::Kind::kAccept) return true;
    user_last_prop_ = act.option;
    user_proposed_[act.option] = true;
    const auto heard = config_.system_channel.transmit(act.option, rng);
    obs_.understood = heard.option;
    obs_.asr_score = heard.score;
    return false;
  }

  DialogueConfig config_;
  Observation obs_;
  OptionCosts user_costs_{};
  std::array<bool, kDialogueOptions> user_proposed_{};
  int user_last_prop_ = -1;
  int user_heard_prop_ = -1;
  int user_turns_ = 0;
  bool done_ = true;
};

}  // namespace esbas
