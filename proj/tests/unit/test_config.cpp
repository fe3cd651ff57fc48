#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "esbas/esbas.hpp"

using namespace esbas;

namespace {

const std::string kSmall = R"(
[experiment]
name = small
runs = 3
seed = 5
episodes = 30

[environment]
kind = dialogue

[meta]
kind = esbas
schedule = custom
epoch_lengths = 10, 20

[portfolio]
algorithms = a, b

[algo:a]
kind = fqi
features = simple-2

[algo:b]
kind = fqi
features = fast-2
epsilon = epoch-power
epsilon_base = 0.6
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST(Config, ParsesAndResolvesDefaults) {
  const auto cfg = parse_config(kSmall);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.runs, 3u);
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.episodes, 30);
  EXPECT_EQ(cfg.meta.kind, MetaKind::kEsbas);
  EXPECT_EQ(cfg.meta.options.xi, 0.25);
  ASSERT_EQ(cfg.algorithms.size(), 2u);
  EXPECT_EQ(cfg.algorithms[1].features, "fast-2");
  EXPECT_EQ(cfg.algorithms[0].iterations, 10);
  EXPECT_TRUE(cfg.resolved.contains("meta.xi"));
  EXPECT_EQ(cfg.portfolio().ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(cfg.fingerprint.size(), 16u);
}

TEST(Config, AllPresetsLoad) {
  for (const auto* name : {"dialogue", "dialogue-constant", "dialogue-constant-noreset", "gridworld"}) {
    const auto path = std::filesystem::path(ESBAS_SOURCE_DIR) / "configs" / (std::string(name) + ".ini");
    EXPECT_NO_THROW(load_config(path)) << name;
  }
  const auto dialogue = load_config(std::filesystem::path(ESBAS_SOURCE_DIR) / "configs" / "dialogue.ini");
  EXPECT_EQ(dialogue.episodes, 40960);
  EXPECT_EQ(dialogue.runs, 1000u);
}

TEST(Config, FingerprintTracksSettings) {
  const auto a = parse_config(kSmall);
  EXPECT_EQ(parse_config(kSmall).fingerprint, a.fingerprint);
  EXPECT_EQ(parse_config("; comment\n" + kSmall).fingerprint, a.fingerprint);
  EXPECT_NE(parse_config(replace(kSmall, "seed = 5", "seed = 6")).fingerprint, a.fingerprint);
  // Spelling out a default changes nothing.
  EXPECT_EQ(parse_config(replace(kSmall, "kind = esbas", "kind = esbas\nxi = 0.25")).fingerprint, a.fingerprint);
}

TEST(Config, SeedOverride) {
  const auto cfg = parse_config(kSmall, ".", 77);
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.resolved.at("experiment.seed"), "77");
  EXPECT_EQ(cfg.fingerprint, parse_config(replace(kSmall, "seed = 5", "seed = 77")).fingerprint);
}

TEST(Config, ResolvedIniRoundTrips) {
  const auto cfg = parse_config(kSmall);
  const auto again = parse_config(resolved_ini(cfg));
  EXPECT_EQ(again.fingerprint, cfg.fingerprint);
  EXPECT_EQ(again.resolved, cfg.resolved);
}

TEST(Config, Rejections) {
  const std::pair<std::string, std::string> bad[] = {
      {"runs = 3", "runs = 0"},
      {"runs = 3", "runs = three"},
      {"name = small", "name = small\ncolour = blue"},
      {"kind = dialogue", "kind = maze"},
      {"kind = esbas", "kind = exp3"},
      {"kind = esbas", "kind = esbas\nxi = 0"},
      {"epoch_lengths = 10, 20", "epoch_lengths = 10, 10"},
      {"episodes = 30", "episodes = 5"},
      {"algorithms = a, b", "algorithms = a, c"},
      {"algorithms = a, b", "algorithms = a"},
      {"algorithms = a, b", "algorithms = a, b/"},
      {"features = fast-2", "features = fastest"},
      {"kind = fqi\nfeatures = simple-2", "kind = q-learning\nlearning_rate = 0.1"},
      {"[portfolio]", "[extra]\nx = 1\n[portfolio]"},
      {"epsilon_base = 0.6", "epsilon_base = 0.6\nepsilon_end = 0.1"},
  };
  for (const auto& [from, to] : bad) {
    EXPECT_THROW(parse_config(replace(kSmall, from, to)), ConfigError) << to;
  }
  EXPECT_THROW(parse_config("[experiment\nname = x"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, ShortSightedNeedsAnEpochalMeta) {
  const auto ssbas = replace(replace(kSmall, "kind = esbas", "kind = ssbas"), "[portfolio]",
                             "[evaluation]\nshort_sighted = true\n[portfolio]");
  EXPECT_THROW(parse_config(ssbas), ConfigError);
  const auto esbas = replace(kSmall, "[portfolio]", "[evaluation]\nshort_sighted = true\nrollouts = 7\n[portfolio]");
  EXPECT_EQ(parse_config(esbas).meta.options.evaluation_rollouts, 7);
}

TEST(Config, GridworldPresetMatchesItsMap) {
  const auto cfg = load_config(std::filesystem::path(ESBAS_SOURCE_DIR) / "configs" / "gridworld.ini");
  EXPECT_EQ(cfg.environment.kind, EnvKind::kGridworld);
  EXPECT_EQ(cfg.meta.kind, MetaKind::kSsbas);
  EXPECT_TRUE(cfg.meta.sliding);
  const Gridworld env(cfg.environment.gridworld);
  EXPECT_EQ(enumerate_states(cfg.environment.gridworld.map).size(), 270u);
  EXPECT_EQ(cfg.environment.gridworld.map.render(), GridMap::default_map().render());
  const auto portfolio = build_portfolio(cfg, env);
  EXPECT_EQ(portfolio.size(), cfg.algorithms.size());
}
