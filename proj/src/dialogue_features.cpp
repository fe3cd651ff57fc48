#include "esbas/algorithms/dialogue_features.hpp"
#include <charconv>

namespace esbas {

double time_feature(int turn) {
  const double x = 0.1 * turn;
  return x / (x + 1.0);
}

double asr_feature(const DialogueObservation& obs) {
  return obs.understood >= 0 ? obs.asr_score : 0.0;
}

double cost_difference_feature(const DialogueObservation& obs) {
  if (obs.understood < 0) return 0.0;
  return obs.system_costs[obs.understood] - obs.system_costs[next_new_proposal(obs)];
}

FeatureSet<DialogueObservation> dialogue_feature_set(std::string_view name) {
  using Obs = DialogueObservation;
  int zeta = 0;
  std::string_view base = name;
  if (name.starts_with("n-")) {
    const auto rest = name.substr(2);
    const auto dash = rest.find('-');
    if (dash == std::string_view::npos) throw ConfigError("bad feature set name: " + std::string(name));
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + dash, zeta);
    if (ec != std::errc{} || ptr != rest.data() + dash || zeta < 0) {
      throw ConfigError("bad noise count in feature set name: " + std::string(name));
    }
    base = rest.substr(dash + 1);
  }

  std::vector<BaseFeature<Obs>> features = {
      {"asr", [](const Obs& o) { return asr_feature(o); }},
      {"dif", [](const Obs& o) { return cost_difference_feature(o); }},
  };
  bool quadratic = false;
  if (base == "simple" || base == "simple-2") {
    features.push_back({"t", [](const Obs& o) { return time_feature(o.turn); }});
    quadratic = base == "simple-2";
  } else if (base == "fast" || base == "fast-2") {
    quadratic = base == "fast-2";
  } else {
    throw ConfigError("unknown dialogue feature set: " + std::string(name));
  }
  return FeatureSet<Obs>(std::string(name), std::move(features), quadratic, zeta);
}
}  // namespace esbas
