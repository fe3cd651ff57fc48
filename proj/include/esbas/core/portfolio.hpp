#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "esbas/core/errors.hpp"
#include "esbas/core/trajectory.hpp"

namespace esbas {

enum class LearnerKind { kQLearning, kFittedQ, kConstant };

inline std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kQLearning: return "q-learning";
    case LearnerKind::kFittedQ: return "fqi";
    case LearnerKind::kConstant: return "constant";
  }
  return "unknown";
}

struct AlgorithmDescriptor {
  std::string id;
  LearnerKind kind = LearnerKind::kFittedQ;
  std::map<std::string, std::string> hyperparameters;
  bool is_constant = false;
};

/// Ordered, non-empty list of algorithm descriptors with unique ids.
class Portfolio {
 public:
  explicit Portfolio(std::vector<AlgorithmDescriptor> members) : members_(std::move(members)) {
    if (members_.empty()) throw ConfigError("portfolio must hold at least one algorithm");
    for (std::size_t i = 0; i < members_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (members_[i].id == members_[j].id) {
          throw ConfigError("duplicate algorithm id in portfolio: " + members_[i].id);
        }
      }
    }
  }

  std::size_t size() const noexcept { return members_.size(); }
  const AlgorithmDescriptor& operator[](std::size_t k) const { return members_.at(k); }
  const std::vector<AlgorithmDescriptor>& members() const noexcept { return members_; }

  std::size_t index_of(std::string_view id) const {
    auto it = std::find_if(members_.begin(), members_.end(),
                           [&](const AlgorithmDescriptor& d) { return d.id == id; });
    if (it == members_.end()) throw LookupError("unknown algorithm id: " + std::string(id));
    return static_cast<std::size_t>(it - members_.begin());
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.id);
    return out;
  }

 private:
  std::vector<AlgorithmDescriptor> members_;
};

/// Episodes of `set` controlled by algorithm `algo_id`, in meta-time order.
template <class Obs>
TrajectoryView<Obs> sub_trajectories(const TrajectorySet<Obs>& set, const Portfolio& portfolio,
                                     std::string_view algo_id) {
  const std::size_t k = portfolio.index_of(algo_id);
  TrajectoryView<Obs> view;
  for (const auto& episode : set) {
    if (episode.controller == k) view.emplace_back(episode);
  }
  return view;
}

}  // namespace esbas
