// esbas_cli: run experiments, rebuild reports from logs, list presets.
//
// Exit codes: 0 success, 2 invalid configuration or input, 3 runtime abort
// (partial outputs are kept and flagged by an INCOMPLETE file).

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "esbas/esbas.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

#ifndef ESBAS_PRESET_DIR
#define ESBAS_PRESET_DIR "configs"
#endif

fs::path preset_dir() {
  if (const char* env = std::getenv("ESBAS_PRESET_DIR")) return env;
  return ESBAS_PRESET_DIR;
}

// A config argument is a file path, or the name of a preset.
fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const auto preset = preset_dir() / (arg + ".ini");
  if (fs::exists(preset)) return preset;
  throw esbas::ConfigError("no config file or preset named '" + arg + "'");
}

std::optional<std::uint64_t> seed_from_env() {
  const char* text = std::getenv("ESBAS_SEED");
  if (!text || !*text) return std::nullopt;
  std::uint64_t seed = 0;
  const char* end = text + std::char_traits<char>::length(text);
  const auto [ptr, ec] = std::from_chars(text, end, seed);
  if (ec != std::errc() || ptr != end) throw esbas::ConfigError(std::string("ESBAS_SEED is not an integer: ") + text);
  return seed;
}

// Tail fraction recorded by `run` next to its logs, if any.
double detect_tail_fraction(const fs::path& logs) {
  for (const auto& candidate : {logs / "config.ini", logs.parent_path() / "config.ini"}) {
    if (!fs::exists(candidate)) continue;
    std::ifstream in(candidate);
    std::string line;
    bool in_experiment = false;
    while (std::getline(in, line)) {
      if (line.starts_with("[")) in_experiment = line == "[experiment]";
      if (in_experiment && line.starts_with("tail_fraction = ")) {
        return esbas::params_io::parse_double(line.substr(16));
      }
    }
  }
  return 0.1;
}

void prepare_output(const fs::path& out, bool overwrite) {
  if (!fs::exists(out)) return;
  if (!fs::is_directory(out)) throw esbas::ConfigError("output path is not a directory: " + out.string());
  if (fs::is_empty(out)) return;
  if (!overwrite) {
    throw esbas::ConfigError("output directory " + out.string() + " is not empty (use --overwrite)");
  }
  for (const char* name : {"logs", "config.ini", "episodes.csv", "performance.csv", "ratios.csv", "report.json",
                           "INCOMPLETE"}) {
    fs::remove_all(out / name);
  }
}

template <class Env>
int run_with(const esbas::ExperimentConfig& cfg, const Env& env, const fs::path& out, unsigned workers,
             bool overwrite) {
  // Building the portfolio may still reject the config; do it before any file exists.
  auto portfolio = esbas::build_portfolio(cfg, env);
  prepare_output(out, overwrite);
  const auto outcome = esbas::run_experiment(cfg, portfolio, env, out, workers);
  if (outcome.report) std::cout << esbas::summary_table(*outcome.report);
  for (const auto& e : outcome.errors) std::cerr << "error: " << e << "\n";
  if (!outcome.complete()) {
    std::cerr << "experiment incomplete; partial outputs in " << out.string() << "\n";
    return kExitRuntime;
  }
  std::cout << "outputs written to " << out.string() << "\n";
  return 0;
}

int cmd_run(const std::string& config_arg, const std::string& out_arg, unsigned workers, bool overwrite) {
  esbas::ExperimentConfig cfg;
  try {
    cfg = esbas::load_config(resolve_config(config_arg), seed_from_env());
  } catch (const esbas::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalid;
  }
  const fs::path out = out_arg.empty() ? fs::path("results") / cfg.name : fs::path(out_arg);
  try {
    if (cfg.environment.kind == esbas::EnvKind::kDialogue) {
      return run_with(cfg, esbas::DialogueEnv(cfg.environment.dialogue), out, workers, overwrite);
    }
    return run_with(cfg, esbas::Gridworld(cfg.environment.gridworld), out, workers, overwrite);
  } catch (const esbas::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_report(const std::string& logs, const std::string& out, std::optional<double> tail_fraction) {
  try {
    const double tail = tail_fraction ? *tail_fraction : detect_tail_fraction(logs);
    const auto report = esbas::report_from_logs(logs, tail);
    const auto files = esbas::render_report(report);
    if (out.empty()) {
      std::cout << files.report_json;
    } else {
      fs::create_directories(out);
      esbas::write_report_files(out, files);
      std::cout << esbas::summary_table(report);
    }
    return report.valid ? 0 : kExitRuntime;
  } catch (const esbas::ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "report failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_presets_list() {
  const auto dir = preset_dir();
  if (!fs::is_directory(dir)) {
    std::cerr << "preset directory not found: " << dir.string() << "\n";
    return kExitInvalid;
  }
  std::vector<fs::path> presets;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".ini") presets.push_back(entry.path());
  }
  std::sort(presets.begin(), presets.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem() < b.stem(); });
  for (const auto& p : presets) {
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    const auto description = first.starts_with("#") ? first.substr(first.find_first_not_of("# ")) : "";
    std::cout << p.stem().string() << "\t" << description << "\n";
  }
  return 0;
}

// Searches warm-up sizes and seeds for the constant policy whose greedy value
// is closest to `fraction` times the reference learner's final-epoch
// performance, measured on canonical runs of the reference.
int cmd_calibrate(const std::string& config_arg, const std::string& reference_id, const std::string& algo_id,
                  double fraction, std::size_t reference_runs, std::vector<int> sizes, int seed_count,
                  int rollouts) {
  try {
    const auto cfg = esbas::load_config(resolve_config(config_arg), seed_from_env());
    if (cfg.environment.kind != esbas::EnvKind::kDialogue) {
      throw esbas::ConfigError("calibration is implemented for the dialogue environment");
    }
    const esbas::DialogueEnv env(cfg.environment.dialogue);
    const auto find = [&](const std::string& id) -> const esbas::AlgorithmSpec& {
      for (const auto& a : cfg.algorithms) {
        if (a.id == id) return a;
      }
      throw esbas::ConfigError("unknown algorithm id: " + id);
    };
    const auto& ref = find(reference_id);
    const auto& constant = find(algo_id);
    if (constant.kind != esbas::LearnerKind::kConstant) throw esbas::ConfigError(algo_id + " is not a constant arm");

    std::vector<std::unique_ptr<esbas::Learner<esbas::DialogueEnv>>> learners;
    learners.push_back(esbas::build_learner(ref, env));
    const esbas::LearnerPortfolio<esbas::DialogueEnv> portfolio(
        esbas::Portfolio({{ref.id, ref.kind, {}, false}}), std::move(learners));
    double reference = 0.0;
    for (std::size_t i = 0; i < reference_runs; ++i) {
      const auto log = esbas::run_canonical(portfolio, 0, env, cfg.meta.schedule, cfg.episodes,
                                            esbas::RunSeeds{cfg.seed, i});
      const auto perf = esbas::summarize(log).epoch_performance;
      reference += perf.back();
    }
    reference /= static_cast<double>(reference_runs);
    const double target = fraction * reference;
    std::cout << "reference " << reference_id << " final-epoch return " << reference << ", target " << target
              << "\n";

    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= seed_count; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    const auto features = esbas::dialogue_feature_set(constant.features);
    const auto candidates = esbas::survey_constant_policies(
        env, features, esbas::FqiOptions{constant.gamma, constant.iterations, constant.regularization}, sizes, seeds,
        rollouts, cfg.seed + 1);
    const esbas::ConstantCandidate* best = nullptr;
    for (const auto& c : candidates) {
      std::cout << "warmup_episodes=" << c.warmup_episodes << " warmup_seed=" << c.warmup_seed << " value=" << c.value
                << "\n";
      if (!best || std::abs(c.value - target) < std::abs(best->value - target)) best = &c;
    }
    std::cout << "best: warmup_episodes = " << best->warmup_episodes << ", warmup_seed = " << best->warmup_seed
              << ", value = " << best->value << "\n";
    return 0;
  } catch (const esbas::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "calibration failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online algorithm selection experiments (ESBAS / SSBAS)"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and its canonical baselines");
  std::string config;
  std::string out;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool overwrite = false;
  run->add_option("--config", config, "Config file or preset name")->required();
  run->add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory (default results/<name>)");
  run->add_flag("--overwrite", overwrite, "Replace outputs of a previous run in --out");

  auto* report = app.add_subcommand("report", "Recompute the report from run logs");
  std::string logs;
  std::string report_out;
  std::optional<double> tail_fraction;
  report->add_option("--logs", logs, "Directory holding run logs")->required();
  report->add_option("--out", report_out, "Write report.json and CSV curves here instead of printing JSON");
  report->add_option("--tail-fraction", tail_fraction, "Tail used to estimate the optimal return");

  auto* presets = app.add_subcommand("presets", "Bundled experiment configs");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List presets");

  auto* calibrate = app.add_subcommand("calibrate-constant", "Pick warm-up settings for a constant dialogue arm");
  std::string cal_config;
  std::string reference = "simple-2";
  std::string constant_id = "constant";
  double fraction = 0.85;
  std::size_t reference_runs = 5;
  std::vector<int> sizes{5, 10, 20, 50, 100, 200};
  int seed_count = 10;
  int rollouts = 2000;
  calibrate->add_option("--config", cal_config, "Config file or preset name")->required();
  calibrate->add_option("--reference", reference, "Learner whose converged return sets the target");
  calibrate->add_option("--algo", constant_id, "Constant arm to calibrate");
  calibrate->add_option("--fraction", fraction, "Target as a fraction of the reference return");
  calibrate->add_option("--reference-runs", reference_runs, "Canonical runs of the reference");
  calibrate->add_option("--sizes", sizes, "Warm-up sizes to try");
  calibrate->add_option("--seeds", seed_count, "Warm-up seeds to try per size");
  calibrate->add_option("--rollouts", rollouts, "Greedy rollouts per candidate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (*run) return cmd_run(config, out, workers, overwrite);
  if (*report) return cmd_report(logs, report_out, tail_fraction);
  if (*presets_list) return cmd_presets_list();
  if (*calibrate) {
    return cmd_calibrate(cal_config, reference, constant_id, fraction, reference_runs, sizes, seed_count, rollouts);
  }
  return kExitInvalid;
}
