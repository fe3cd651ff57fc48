#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + " \"" ESBAS_CLI "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("esbas_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

const std::string kDialogue = R"(# small dialogue experiment
[experiment]
name = tiny
runs = 2
seed = 11
episodes = 60

[environment]
kind = dialogue

[meta]
kind = esbas
schedule = custom
epoch_lengths = 10, 10, 20, 20

[evaluation]
short_sighted = true
rollouts = 5

[portfolio]
algorithms = simple-2, fast-2

[algo:simple-2]
kind = fqi
features = simple-2
epsilon = epoch-power

[algo:fast-2]
kind = fqi
features = fast-2
epsilon = epoch-power
)";

const std::string kGrid = R"(
[experiment]
name = grid
runs = 2
seed = 3
episodes = 200

[environment]
kind = gridworld
map = )" + std::string(ESBAS_SOURCE_DIR) + R"(/data/gridworld_default.map

[meta]
kind = ssbas
schedule = uniform
block_length = 50

[portfolio]
algorithms = slow, fast

[algo:slow]
kind = q-learning
learning_rate = 0.01
gamma = 0.95
epsilon = linear
epsilon_episodes = 100

[algo:fast]
kind = q-learning
learning_rate = 0.5
gamma = 0.95
epsilon = linear
epsilon_episodes = 100
)";

}  // namespace

TEST_F(Cli, RunIsDeterministicAndReportMatches) {
  const auto cfg = write_config("tiny.ini", kDialogue);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "b").string() + " --workers 2").code, 0);
  for (const auto* name : {"report.json", "performance.csv", "ratios.csv", "episodes.csv", "config.ini",
                           "logs/target/run_0001.json", "logs/baseline-fast-2/run_0000.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / name)) << name;
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
  }
  EXPECT_FALSE(fs::exists(dir_ / "a" / "INCOMPLETE"));

  const auto rebuilt = cli("report --logs " + (dir_ / "a" / "logs").string());
  ASSERT_EQ(rebuilt.code, 0);
  EXPECT_EQ(nlohmann::json::parse(rebuilt.out), nlohmann::json::parse(slurp(dir_ / "a" / "report.json")));

  ASSERT_EQ(cli("report --logs " + (dir_ / "a").string() + " --out " + (dir_ / "r").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "r" / "performance.csv"), slurp(dir_ / "a" / "performance.csv"));

  const auto report = nlohmann::json::parse(slurp(dir_ / "a" / "report.json"));
  EXPECT_EQ(report["runs"], 2);
  EXPECT_TRUE(report["valid"].get<bool>());
}

TEST_F(Cli, CurvesHaveOneRowPerEpochAndSeries) {
  const auto cfg = write_config("tiny.ini", kDialogue);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  const auto perf = lines(slurp(dir_ / "a" / "performance.csv"));
  // Header plus 4 epochs for the target and each of 2 baselines.
  EXPECT_EQ(perf.size(), 1u + 4u * 3u);
  const auto ratios = lines(slurp(dir_ / "a" / "ratios.csv"));
  ASSERT_EQ(ratios.size(), 1u + 4u * 2u);
  std::map<std::string, double> per_epoch;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    const auto comma = ratios[i].find(',');
    const auto second = ratios[i].find(',', comma + 1);
    const auto third = ratios[i].find(',', second + 1);
    per_epoch[ratios[i].substr(0, comma)] += std::stod(ratios[i].substr(second + 1, third - second - 1));
  }
  EXPECT_EQ(per_epoch.size(), 4u);
  for (const auto& [epoch, sum] : per_epoch) EXPECT_NEAR(sum, 1.0, 1e-9) << epoch;
  const auto episodes = lines(slurp(dir_ / "a" / "episodes.csv"));
  EXPECT_EQ(episodes.size(), 1u + 2u * 60u);
}

TEST_F(Cli, GridworldSsbasRuns) {
  const auto cfg = write_config("grid.ini", kGrid);
  const auto r = cli("run --config " + cfg.string() + " --out " + (dir_ / "g").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fast"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir_ / "g" / "report.json"));
  EXPECT_EQ(report["horizon"], 200);
  EXPECT_EQ(lines(slurp(dir_ / "g" / "performance.csv")).size(), 1u + 4u * 3u);
}

TEST_F(Cli, SeedFromEnvironment) {
  const auto cfg = write_config("tiny.ini", kDialogue);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string(), "ESBAS_SEED=99").code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "config.ini").find("seed = 99"), std::string::npos);
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "b").string(), "ESBAS_SEED=x").code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "b"));
}

TEST_F(Cli, InvalidConfigLeavesNoOutputs) {
  std::string bad = kDialogue;
  bad.replace(bad.find("runs = 2"), 8, "runs = 0");
  const auto cfg = write_config("bad.ini", bad);
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "x").string()).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  EXPECT_EQ(cli("run --config no-such-preset --out " + (dir_ / "x").string()).code, 2);
  EXPECT_EQ(cli("run").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST_F(Cli, RefusesToClobberWithoutOverwrite) {
  const auto cfg = write_config("tiny.ini", kDialogue);
  const auto out = (dir_ / "a").string();
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + out).code, 0);
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out).code, 2);
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out + " --overwrite").code, 0);
}

TEST_F(Cli, ReportRejectsEmptyAndMixedDirectories) {
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(cli("report --logs " + (dir_ / "empty").string()).code, 2);

  const auto cfg = write_config("tiny.ini", kDialogue);
  std::string other = kDialogue;
  other.replace(other.find("seed = 11"), 9, "seed = 12");
  const auto cfg2 = write_config("other.ini", other);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("run --config " + cfg2.string() + " --out " + (dir_ / "b").string()).code, 0);
  fs::create_directories(dir_ / "mixed");
  fs::copy(dir_ / "a" / "logs", dir_ / "mixed" / "a", fs::copy_options::recursive);
  fs::copy(dir_ / "b" / "logs", dir_ / "mixed" / "b", fs::copy_options::recursive);
  EXPECT_EQ(cli("report --logs " + (dir_ / "mixed").string()).code, 2);

  // A missing baseline log is an error too.
  fs::remove(dir_ / "a" / "logs" / "baseline-fast-2" / "run_0001.json");
  EXPECT_EQ(cli("report --logs " + (dir_ / "a" / "logs").string()).code, 2);
}

TEST_F(Cli, PresetsList) {
  const auto r = cli("presets list");
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[0].starts_with("dialogue\t"));
  EXPECT_TRUE(rows[3].starts_with("gridworld\t"));
}
