#include "esbas/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "esbas/algorithms/dialogue_features.hpp"
#include "esbas/algorithms/params_io.hpp"

namespace esbas {

namespace {

std::string format_value(const std::string& v) { return v; }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(double v) { return params_io::format_double(v); }
template <class T>
  requires std::is_integral_v<T>
std::string format_value(T v) {
  return std::to_string(v);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_value(const std::string& where, const std::string& text) {
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(where + ": expected a boolean, got '" + text + "'");
  } else if constexpr (std::is_floating_point_v<T>) {
    try {
      return params_io::parse_double(text);
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected a number, got '" + text + "'");
    }
  } else {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(where + ": expected an integer, got '" + text + "'");
    return value;
  }
}

/// Typed access to one INI section that records every value it hands out
/// (defaults included) and rejects keys nobody asked for.
class Section {
 public:
  Section(std::string name, const boost::property_tree::ptree* tree,
          std::map<std::string, std::string>& resolved)
      : name_(std::move(name)), tree_(tree), resolved_(resolved) {}

  template <class T>
  T get(const std::string& key, const T& fallback) {
    T value = fallback;
    if (auto raw = raw_value(key)) value = parse_value<T>(where(key), *raw);
    resolved_[name_ + "." + key] = format_value(value);
    return value;
  }

  template <class T>
  T require(const std::string& key) {
    auto raw = raw_value(key);
    if (!raw) throw ConfigError("missing required key " + where(key));
    T value = parse_value<T>(where(key), *raw);
    resolved_[name_ + "." + key] = format_value(value);
    return value;
  }

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!used_.contains(key)) throw ConfigError("unknown key " + where(key));
    }
  }

 private:
  std::optional<std::string> raw_value(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string name_;
  const boost::property_tree::ptree* tree_;
  std::map<std::string, std::string>& resolved_;
  std::set<std::string> used_;
};

const boost::property_tree::ptree* find_section(const boost::property_tree::ptree& root,
                                                       const std::string& name) {
  for (const auto& [key, child] : root) {
    if (key == name) return &child;
  }
  return nullptr;
}

EpsilonSchedule read_epsilon(Section& s, const std::string& fallback_kind) {
  const auto kind = s.get<std::string>("epsilon", fallback_kind);
  if (kind == "epoch-power") return EpsilonSchedule::epoch_power(s.get("epsilon_base", 0.6));
  if (kind == "linear") {
    return EpsilonSchedule::linear(s.get("epsilon_start", 1.0), s.get("epsilon_end", 0.01),
                                   s.get<std::int64_t>("epsilon_episodes", 10000));
  }
  if (kind == "constant") return EpsilonSchedule::constant(s.get("epsilon_value", 0.0));
  throw ConfigError(s.where("epsilon") + ": unknown schedule '" + kind + "'");
}

LearnerKind parse_learner_kind(const Section& s, const std::string& text) {
  if (text == "fqi") return LearnerKind::kFittedQ;
  if (text == "q-learning") return LearnerKind::kQLearning;
  if (text == "constant") return LearnerKind::kConstant;
  throw ConfigError(s.where("kind") + ": unknown learner kind '" + text + "'");
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string fingerprint_of(const std::map<std::string, std::string>& resolved) {
  std::string text;
  for (const auto& [key, value] : resolved) text += key + "=" + value + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_label(text)));
  return buf;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed_override) {
  namespace pt = boost::property_tree;
  pt::ptree root;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("malformed config: " + std::string(e.what()));
  }

  ExperimentConfig cfg;
  auto& resolved = cfg.resolved;
  static const std::set<std::string> fixed_sections{"experiment", "environment", "meta", "evaluation", "portfolio"};
  for (const auto& [key, child] : root) {
    if (!fixed_sections.contains(key) && !key.starts_with("algo:")) throw ConfigError("unknown section [" + key + "]");
    if (child.empty() && !child.data().empty()) throw ConfigError("key outside any section: " + key);
  }

  Section experiment("experiment", find_section(root, "experiment"), resolved);
  cfg.name = experiment.get<std::string>("name", "experiment");
  cfg.runs = experiment.get<std::size_t>("runs", 1);
  cfg.seed = experiment.get<std::uint64_t>("seed", 0);
  if (seed_override) {
    cfg.seed = *seed_override;
    resolved["experiment.seed"] = std::to_string(cfg.seed);
  }
  cfg.tail_fraction = experiment.get("tail_fraction", 0.1);
  if (cfg.runs < 1) throw ConfigError(experiment.where("runs") + " must be >= 1");
  if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0)) {
    throw ConfigError(experiment.where("tail_fraction") + " must lie in (0, 1]");
  }

  Section env("environment", find_section(root, "environment"), resolved);
  const auto env_kind = env.require<std::string>("kind");
  if (env_kind == "dialogue") {
    auto& d = cfg.environment.dialogue;
    cfg.environment.kind = EnvKind::kDialogue;
    d.system_channel.ser = env.get("system_ser", 0.3);
    d.system_channel.score_std = env.get("system_score_std", 0.2);
    d.user_channel.ser = env.get("user_ser", 0.0);
    d.user_channel.score_std = env.get("user_score_std", 0.2);
    d.user.accept_threshold = env.get("user_accept_threshold", 0.35);
    d.user.patience = env.get("user_patience", 6);
    d.max_turns = env.get("max_turns", 20);
    d.gamma = env.get("gamma", 0.9);
    d.validate();
  } else if (env_kind == "gridworld") {
    auto& g = cfg.environment.gridworld;
    cfg.environment.kind = EnvKind::kGridworld;
    const auto map = env.get<std::string>("map", "default");
    if (map != "default") g.map = GridMap::load(resolve_path(base_dir, map).string());
    resolved["environment.map_layout"] = g.map.render();
    g.noise_std = env.get("noise_std", 1.0);
    g.max_steps = env.get("max_steps", 100);
    g.timeout_objective = env.get("timeout_objective", 200.0);
    g.gamma = env.get("gamma", 0.95);
    g.validate();
  } else {
    throw ConfigError(env.where("kind") + ": unknown environment '" + env_kind + "'");
  }
  const bool dialogue = cfg.environment.kind == EnvKind::kDialogue;
  const double env_gamma = dialogue ? cfg.environment.dialogue.gamma : cfg.environment.gridworld.gamma;

  Section meta("meta", find_section(root, "meta"), resolved);
  const auto meta_kind = meta.get<std::string>("kind", "esbas");
  if (meta_kind == "esbas") cfg.meta.kind = MetaKind::kEsbas;
  else if (meta_kind == "ssbas") cfg.meta.kind = MetaKind::kSsbas;
  else if (meta_kind == "round-robin") cfg.meta.kind = MetaKind::kRoundRobin;
  else if (meta_kind == "canonical") cfg.meta.kind = MetaKind::kCanonical;
  else throw ConfigError(meta.where("kind") + ": unknown meta-algorithm '" + meta_kind + "'");
  if (cfg.meta.kind == MetaKind::kCanonical) cfg.canonical_arm = meta.require<std::string>("canonical_arm");
  cfg.meta.options.xi = meta.get("xi", 0.25);
  if (!(cfg.meta.options.xi > 0.0)) throw ConfigError(meta.where("xi") + " must be > 0");
  cfg.meta.options.no_reset_constant_arms = meta.get("no_reset_constant_arms", false);
  cfg.meta.options.learner_update_period = meta.get("learner_update_period", 1);
  if (cfg.meta.options.learner_update_period < 1) {
    throw ConfigError(meta.where("learner_update_period") + " must be >= 1");
  }
  cfg.meta.sliding = meta.get("sliding_baselines", cfg.meta.kind == MetaKind::kSsbas);

  const auto schedule = meta.get<std::string>("schedule", "power-of-two");
  if (schedule == "power-of-two") {
    cfg.meta.schedule = EpochSchedule::power_of_two();
  } else if (schedule == "doubling") {
    cfg.meta.schedule = EpochSchedule::doubling(meta.get<std::int64_t>("first_epoch_length", 20),
                                                meta.get("first_epoch_repeat", 2), meta.get("epochs", 12));
  } else if (schedule == "custom") {
    std::vector<std::int64_t> lengths;
    for (const auto& item : split_list(meta.require<std::string>("epoch_lengths"))) {
      lengths.push_back(parse_value<std::int64_t>(meta.where("epoch_lengths"), item));
    }
    cfg.meta.schedule = EpochSchedule::custom(std::move(lengths));
  } else if (schedule == "uniform") {
    const auto block = meta.require<std::int64_t>("block_length");
    cfg.meta.schedule = EpochSchedule::uniform(block, experiment.require<std::int64_t>("episodes"));
  } else {
    throw ConfigError(meta.where("schedule") + ": unknown schedule '" + schedule + "'");
  }

  const std::int64_t bounded = cfg.meta.schedule.total();
  cfg.episodes = bounded > 0 ? experiment.get<std::int64_t>("episodes", bounded)
                             : experiment.require<std::int64_t>("episodes");
  if (cfg.episodes < static_cast<std::int64_t>(kMinTailLogLength)) {
    throw ConfigError(experiment.where("episodes") + " must be >= " + std::to_string(kMinTailLogLength));
  }
  if (!cfg.meta.schedule.covers(cfg.episodes)) {
    throw ConfigError("the epoch schedule covers " + std::to_string(bounded) + " episodes, fewer than " +
                      experiment.where("episodes") + " = " + std::to_string(cfg.episodes));
  }

  Section evaluation("evaluation", find_section(root, "evaluation"), resolved);
  const bool short_sighted = evaluation.get("short_sighted", false);
  const int rollouts = evaluation.get("rollouts", 100);
  if (rollouts < 1) throw ConfigError(evaluation.where("rollouts") + " must be >= 1");
  cfg.meta.options.evaluation_rollouts = short_sighted ? rollouts : 0;
  if (short_sighted && cfg.meta.is_sliding()) {
    throw ConfigError(evaluation.where("short_sighted") + " needs an epochal meta-algorithm");
  }

  Section portfolio("portfolio", find_section(root, "portfolio"), resolved);
  const auto ids = split_list(portfolio.require<std::string>("algorithms"));
  if (ids.empty()) throw ConfigError(portfolio.where("algorithms") + " is empty");

  std::vector<Section> algo_sections;
  for (const auto& id : ids) {
    const bool safe = std::all_of(id.begin(), id.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
    if (!safe) throw ConfigError(portfolio.where("algorithms") + ": id '" + id + "' may only use [A-Za-z0-9._-]");
    const std::string name = "algo:" + id;
    const auto* tree = find_section(root, name);
    if (!tree) throw ConfigError("portfolio member '" + id + "' has no [" + name + "] section");
    auto& s = algo_sections.emplace_back(name, tree, resolved);
    AlgorithmSpec a;
    a.id = id;
    a.kind = parse_learner_kind(s, s.require<std::string>("kind"));
    switch (a.kind) {
      case LearnerKind::kFittedQ:
        a.features = s.get<std::string>("features", dialogue ? "simple-2" : "one-hot");
        a.gamma = s.get("gamma", env_gamma);
        a.iterations = s.get("iterations", 10);
        a.regularization = s.get("regularization", 1e-3);
        a.epsilon = read_epsilon(s, "epoch-power");
        break;
      case LearnerKind::kQLearning:
        if (dialogue) throw ConfigError(s.where("kind") + ": q-learning needs a tabular environment");
        a.learning_rate = s.require<double>("learning_rate");
        if (!(a.learning_rate > 0.0 && a.learning_rate <= 1.0)) {
          throw ConfigError(s.where("learning_rate") + " must lie in (0, 1]");
        }
        a.gamma = s.get("gamma", env_gamma);
        a.epsilon = read_epsilon(s, "linear");
        break;
      case LearnerKind::kConstant:
        a.features = s.get<std::string>("features", dialogue ? "simple-2" : "one-hot");
        a.declared_mean = s.get("declared_mean", 0.0);
        if (s.has("params")) {
          a.params_path = resolve_path(base_dir, s.get<std::string>("params", "")).string();
        } else {
          a.warmup_episodes = s.require<int>("warmup_episodes");
          a.warmup_seed = s.get<std::uint64_t>("warmup_seed", 0);
          a.gamma = s.get("gamma", env_gamma);
          a.iterations = s.get("iterations", 10);
          a.regularization = s.get("regularization", 1e-3);
          if (a.warmup_episodes < 1) throw ConfigError(s.where("warmup_episodes") + " must be >= 1");
        }
        break;
    }
    check_discount(a.gamma);
    if (a.kind != LearnerKind::kQLearning) {
      if (dialogue) {
        try {
          dialogue_feature_set(a.features);
        } catch (const ConfigError& e) {
          throw ConfigError(s.where("features") + ": " + e.what());
        }
      } else if (a.features != "one-hot") {
        throw ConfigError(s.where("features") + ": gridworld learners only support one-hot");
      }
    }
    cfg.algorithms.push_back(std::move(a));
  }
  const auto portfolio_check = cfg.portfolio();
  if (cfg.meta.kind == MetaKind::kCanonical) cfg.meta.arm = portfolio_check.index_of(cfg.canonical_arm);

  experiment.reject_unknown();
  env.reject_unknown();
  meta.reject_unknown();
  evaluation.reject_unknown();
  portfolio.reject_unknown();
  for (const auto& s : algo_sections) s.reject_unknown();
  for (const auto& [key, child] : root) {
    if (key.starts_with("algo:") &&
        std::find(ids.begin(), ids.end(), key.substr(5)) == ids.end()) {
      throw ConfigError("section [" + key + "] is not listed in [portfolio] algorithms");
    }
  }

  cfg.fingerprint = fingerprint_of(resolved);
  cfg.meta.options.fingerprint = cfg.fingerprint;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path(), seed_override);
}

std::string resolved_ini(const ExperimentConfig& cfg) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [key, value] : cfg.resolved) {
    const auto dot = key.find('.');
    sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
  }
  std::string out;
  for (const auto& [section, entries] : sections) {
    out += "[" + section + "]\n";
    for (const auto& [key, value] : entries) {
      if (value.find('\n') != std::string::npos) continue;  // map layout lives in the map file
      out += key + " = " + value + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace esbas
