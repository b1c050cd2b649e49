#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <system_error>

#include "trustq/scenario.hpp"

namespace {

using trustq::ConfigError;
using trustq::parse_scenario;

TEST(Parse, DefaultsFromEmptyText) {
  const auto cfg = parse_scenario("");
  EXPECT_EQ(cfg.n_nodes, 16u);
  EXPECT_DOUBLE_EQ(cfg.trust.threshold, 0.45);
  EXPECT_DOUBLE_EQ(cfg.l_max, 120.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Parse, SectionsKeysAndComments) {
  const auto cfg = parse_scenario(R"(
# leading comment
[scenario]
topology = grid      ; trailing comment
n_nodes = 8
velocity_range = 10, 20
heading_mode = forward
topology_change_at = 50
source = 0
destination = 7

[trust]
c = 0.95
T_th = 0.6
fusion_rule = yager
fixed_confidence = 0.5

[learning]
epsilon = 0.05
gamma = 0.9

[attackers.gh]
kind = grayhole
ids = 2, 3
grayhole_period = 40
phase_mode = packets

[node.4]
speed = 23
static = true
)");
  EXPECT_EQ(cfg.topology, trustq::TopologyKind::kGrid);
  EXPECT_EQ(cfg.n_nodes, 8u);
  EXPECT_DOUBLE_EQ(cfg.velocity_min, 10.0);
  EXPECT_DOUBLE_EQ(cfg.velocity_max, 20.0);
  EXPECT_EQ(cfg.heading_mode, trustq::HeadingMode::kForward);
  EXPECT_EQ(cfg.topology_change_at, 50u);
  EXPECT_EQ(cfg.source, 0u);
  EXPECT_EQ(cfg.destination, 7u);
  EXPECT_DOUBLE_EQ(cfg.trust.decay, 0.95);
  EXPECT_DOUBLE_EQ(cfg.trust.threshold, 0.6);
  EXPECT_EQ(cfg.trust.fusion, trustq::trust::FusionRule::kYager);
  EXPECT_EQ(cfg.trust.fixed_confidence, 0.5);
  EXPECT_DOUBLE_EQ(cfg.epsilon.start, 0.05);
  EXPECT_DOUBLE_EQ(cfg.epsilon.final, 0.05);
  EXPECT_DOUBLE_EQ(cfg.learning.gamma, 0.9);
  ASSERT_EQ(cfg.attackers.size(), 1u);
  const auto& g = cfg.attackers[0];
  EXPECT_EQ(g.name, "gh");
  EXPECT_EQ(g.templ.kind, trustq::adversary::AttackKind::kGrayhole);
  EXPECT_TRUE(g.templ.lure);
  EXPECT_EQ(g.ids, (std::vector<trustq::NodeId>{2, 3}));
  EXPECT_EQ(g.templ.grayhole_period, 40u);
  EXPECT_EQ(g.templ.phase_mode, trustq::adversary::PhaseMode::kPacketCount);
  const auto& o = cfg.node_overrides.at(4);
  EXPECT_EQ(o.speed, 23.0);
  EXPECT_EQ(o.mobile, false);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Parse, RecommendationAttackersDoNotLureByDefault) {
  const auto cfg = parse_scenario("[attackers.bm]\nkind = badmouthing\nfraction = 0.3\n");
  EXPECT_FALSE(cfg.attackers.at(0).templ.lure);
  EXPECT_EQ(cfg.attackers[0].fraction, 0.3);
}

TEST(Parse, PerNodeRoadScaling) {
  const auto cfg = parse_scenario("[scenario]\nn_nodes = 10\nroad_length_per_node = 150\n");
  EXPECT_DOUBLE_EQ(cfg.road_length, 1500.0);
  EXPECT_DOUBLE_EQ(cfg.effective_road_length(), 1500.0);
}

void expect_config_error(const std::string& text, const std::string& field, std::size_t line) {
  try {
    auto cfg = parse_scenario(text);
    cfg.validate();
    FAIL() << "expected ConfigError for field " << field;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos);
  }
}

TEST(ParseErrors, UnknownKeyNamesLine) {
  expect_config_error("[scenario]\nn_nodes = 4\nbogus = 1\n", "scenario.bogus", 3);
}

TEST(ParseErrors, UnknownSection) { expect_config_error("\n[nowhere]\n", "nowhere", 2); }

TEST(ParseErrors, DuplicateKey) {
  expect_config_error("[trust]\nc = 0.9\nc = 0.8\n", "trust.c", 3);
}

TEST(ParseErrors, MalformedNumber) {
  expect_config_error("[scenario]\nn_nodes = many\n", "scenario.n_nodes", 2);
}

TEST(ParseErrors, KeyOutsideSection) { expect_config_error("n_nodes = 4\n", "line", 1); }

TEST(ParseErrors, MissingEquals) { expect_config_error("[scenario]\nn_nodes 4\n", "scenario", 2); }

TEST(ParseErrors, BadHeading) {
  expect_config_error("[node.1]\nheading = 2\n", "node.1.heading", 2);
}

TEST(Validate, ThresholdOutOfRange) {
  expect_config_error("[trust]\nT_th = 1.5\n", "trust.T_th", 2);
}

TEST(Validate, DecayBounds) {
  expect_config_error("[trust]\nc = 1\n", "trust.c", 2);
  expect_config_error("[trust]\nc = 0\n", "trust.c", 2);
}

TEST(Validate, EpisodeTicksMustAlignWithHello) {
  expect_config_error("[scenario]\nticks_per_episode = 7\nhello_interval = 5\n",
                      "scenario.ticks_per_episode", 2);
}

TEST(Validate, TopologyChangeWithinRun) {
  expect_config_error("[scenario]\nepisodes = 10\ntopology_change_at = 11\n",
                      "scenario.topology_change_at", 3);
}

TEST(Validate, SameEndpoints) {
  expect_config_error("[scenario]\nsource = 3\ndestination = 3\n", "scenario.destination", 3);
}

TEST(Validate, AttackerPlacementModes) {
  expect_config_error("[attackers.a]\nkind = blackhole\n", "attackers.a.ids", 0);
  expect_config_error("[attackers.a]\nkind = blackhole\ncount = 1\nfraction = 0.1\n",
                      "attackers.a.ids", 0);
  expect_config_error("[scenario]\nsource = 0\n[attackers.a]\nids = 0\n", "attackers.a.ids", 4);
  expect_config_error("[attackers.a]\nids = 1\n[attackers.b]\nids = 1\n", "attackers.b.ids", 4);
}

TEST(Validate, UnknownAttackKind) {
  expect_config_error("[attackers.a]\nkind = wormhole\n", "attackers.a.kind", 2);
}

TEST(Validate, DefaultValueErrorsCarryNoLine) {
  trustq::ScenarioConfig cfg;
  cfg.n_nodes = 1;
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 0u);
    EXPECT_EQ(std::string(e.what()), "scenario.n_nodes: must be at least 2");
  }
}

TEST(Load, MissingFileIsSystemError) {
  EXPECT_THROW(trustq::load_scenario("/nonexistent/dir/cfg.ini"), std::system_error);
}

TEST(Load, ReadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "trustq_scenario_load.ini";
  {
    std::ofstream out(path);
    out << "[scenario]\nn_nodes = 5\n";
  }
  EXPECT_EQ(trustq::load_scenario(path).n_nodes, 5u);
  std::filesystem::remove(path);
}

}  // namespace
