#include "esbas/metrics/run_log.hpp"

#include <fstream>
#include <stdexcept>

namespace esbas {

nlohmann::json to_json_value(const RunLog& log) {
  nlohmann::json j;
  j["schema"] = RunLog::kSchema;
  j["meta"] = log.meta;
  j["role"] = log.role;
  j["algorithms"] = log.algorithms;
  j["fingerprint"] = log.fingerprint;
  j["seed"] = log.seed;
  j["run"] = log.run;
  j["score"] = log.score_kind == ScoreKind::kReturn ? "return" : "neg-objective";
  j["valid"] = log.valid;
  if (!log.error.empty()) j["error"] = log.error;
  // Columnar layout keeps files compact; meta-time is implied (1, 2, ...).
  auto& cols = j["episodes"];
  cols["epoch"] = nlohmann::json::array();
  cols["algo"] = nlohmann::json::array();
  cols["return"] = nlohmann::json::array();
  cols["objective"] = nlohmann::json::array();
  cols["length"] = nlohmann::json::array();
  cols["invalid"] = nlohmann::json::array();
  for (const auto& r : log.episodes) {
    cols["epoch"].push_back(r.epoch);
    cols["algo"].push_back(r.algo);
    cols["return"].push_back(r.ret);
    cols["objective"].push_back(r.objective);
    cols["length"].push_back(r.length);
    cols["invalid"].push_back(r.invalid_action ? 1 : 0);
  }
  j["epoch_values"] = log.epoch_values;
  return j;
}

RunLog run_log_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != RunLog::kSchema) throw DataError("not an esbas run log");
  RunLog log;
  log.meta = j.at("meta").get<std::string>();
  log.role = j.value("role", "target");
  log.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  log.fingerprint = j.at("fingerprint").get<std::string>();
  log.seed = j.at("seed").get<std::uint64_t>();
  log.run = j.at("run").get<std::uint64_t>();
  log.score_kind = j.at("score").get<std::string>() == "return" ? ScoreKind::kReturn
                                                                 : ScoreKind::kNegObjective;
  log.valid = j.at("valid").get<bool>();
  log.error = j.value("error", "");
  const auto& cols = j.at("episodes");
  const auto& epoch = cols.at("epoch");
  const auto& algo = cols.at("algo");
  const auto& ret = cols.at("return");
  const auto& objective = cols.at("objective");
  const auto& length = cols.at("length");
  const auto& invalid = cols.at("invalid");
  const std::size_t n = epoch.size();
  if (algo.size() != n || ret.size() != n || objective.size() != n || length.size() != n || invalid.size() != n) {
    throw DataError("run log columns have different lengths");
  }
  log.episodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = log.episodes[i];
    r.meta_time = static_cast<std::int64_t>(i) + 1;
    r.epoch = epoch[i].get<int>();
    r.algo = algo[i].get<std::size_t>();
    r.ret = ret[i].get<double>();
    r.objective = objective[i].get<double>();
    r.length = length[i].get<std::int64_t>();
    r.invalid_action = invalid[i].get<int>() != 0;
  }
  log.epoch_values = j.at("epoch_values").get<std::vector<std::vector<double>>>();
  return log;
}

void write_run_log(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run log: " + path);
  out << to_json_value(log).dump() << '\n';
}

RunLog read_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read run log: " + path);
  try {
    return run_log_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed run log " + path + ": " + e.what());
  }
}

}  // namespace esbas
