#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "noma/config.hpp"
#include "noma/serialization.hpp"

using namespace noma;

TEST(ScenarioJson, RoundTripRegeneratesGains) {
  NetworkConfig cfg;
  cfg.num_devices = 6;
  cfg.num_slots = 3;
  const auto s = generate_scenario(cfg, RadioParams{}, TrafficSpec{150, 350}, 42);
  const Json j = to_json(s);
  for (const char* key : {"config", "radio", "positions", "traffic", "seed"}) EXPECT_TRUE(j.contains(key));
  EXPECT_EQ(j.size(), 5u);
  const auto back = scenario_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.digest(), s.digest());
  // Windows are 1-based on disk.
  EXPECT_EQ(j["traffic"][0][0]["arrival"].get<int>(), s.task(0, 0).arrival + 1);
  EXPECT_EQ(j["traffic"][0][0]["deadline"].get<int>(), s.task(0, 0).deadline + 1);

  const auto path = std::filesystem::temp_directory_path() / "noma_scenario_roundtrip.json";
  save_scenario(s, path);
  EXPECT_EQ(load_scenario(path).digest(), s.digest());
  std::filesystem::remove(path);
}

TEST(ScenarioJson, RejectsMalformed) {
  const auto s = generate_scenario(NetworkConfig{}, RadioParams{}, TrafficSpec{}, 1);
  Json j = to_json(s);
  j["positions"].erase(0);
  EXPECT_THROW(scenario_from_json(j), std::invalid_argument);
}

TEST(PowerLabels, ParseAndPrint) {
  const NetworkConfig cfg;
  EXPECT_EQ(power_label(17.0), "17dbm");
  EXPECT_EQ(power_label(kOffLevelDbm), "off");
  EXPECT_EQ(parse_power_label("23dbm", cfg), 3);
  EXPECT_EQ(parse_power_label("off", cfg), 0);
  EXPECT_THROW(parse_power_label("22dbm", cfg), std::invalid_argument);
  EXPECT_THROW(parse_power_label("loud", cfg), std::invalid_argument);
}

TEST(AssignmentJson, RoundTrip) {
  NetworkConfig cfg;
  cfg.num_devices = 2;
  cfg.num_frames = 2;
  Assignment a = {{{0, 1}, {std::nullopt, 0}}, {{4, 3}, {2, 2}}};
  const Json j = to_json(a, cfg);
  EXPECT_EQ(j[0][0]["slot"].get<int>(), 1);
  EXPECT_TRUE(j[0][1]["slot"].is_null());
  EXPECT_EQ(j[1][0]["power"].get<std::string>(), "23dbm");
  const auto back = assignment_from_json(j, cfg);
  for (int t = 0; t < 2; ++t) {
    for (int i = 0; i < 2; ++i) {
      EXPECT_EQ(back[t][i].slot, a[t][i].slot);
      EXPECT_EQ(back[t][i].level, a[t][i].level);
    }
  }
}

TEST(GraphJson, SnapshotRestoresWeights) {
  const double costs[] = {0.0, 50.0, 120.0};
  auto g = TransitionGraph::build(200.0, costs, 3, 0);
  for (std::size_t e = 0; e < g.num_edges(); ++e) g.set_weight(static_cast<int>(e), 1.0 + 0.1 * e);
  const Json snap = to_json(g);
  auto h = TransitionGraph::build(200.0, costs, 3, 0);
  load_weights(h, Json::parse(snap.dump()));
  for (std::size_t e = 0; e < g.num_edges(); ++e) EXPECT_EQ(h.weight(static_cast<int>(e)), g.weight(static_cast<int>(e)));
  auto other = TransitionGraph::build(100.0, costs, 3, 0);
  EXPECT_THROW(load_weights(other, snap), std::invalid_argument);
}

TEST(Toml, ParsesTheSubset) {
  const auto t = parse_toml(R"(# comment
[network]
num_devices = 12   # trailing
bandwidth_hz = 4.0e4
power_levels_dbm = [-100, 17, 23.5]
[opt]
time_limit_s = 5
[misc]
flag = true
name = "a # not a comment"
)");
  EXPECT_EQ(std::get<std::int64_t>(t.at("network").at("num_devices")), 12);
  EXPECT_DOUBLE_EQ(std::get<double>(t.at("network").at("bandwidth_hz")), 40000.0);
  EXPECT_EQ(std::get<std::vector<double>>(t.at("network").at("power_levels_dbm")),
            (std::vector<double>{-100, 17, 23.5}));
  EXPECT_EQ(std::get<bool>(t.at("misc").at("flag")), true);
  EXPECT_EQ(std::get<std::string>(t.at("misc").at("name")), "a # not a comment");
  EXPECT_THROW(parse_toml("[network\n"), std::invalid_argument);
  EXPECT_THROW(parse_toml("x = \n"), std::invalid_argument);
}

TEST(Toml, ConfigSectionsAndDefaults) {
  const auto cfg = config_from_toml(R"(
[network]
group_cap = 8
energy_budget = 300
[traffic]
max_kbits = 200
[crl]
rounds = 30
[tql]
episodes = 40
[opt]
time_limit_s = 12.5
[harness]
eval_window = 5
)");
  EXPECT_EQ(cfg.network.group_cap, 8);
  EXPECT_DOUBLE_EQ(cfg.network.energy_budget, 300.0);
  EXPECT_EQ(cfg.network.num_devices, 20);
  EXPECT_EQ(cfg.traffic.max_kbits, 200);
  EXPECT_EQ(cfg.crl.rounds, 30);
  EXPECT_DOUBLE_EQ(cfg.crl.gamma, 0.5);
  EXPECT_EQ(cfg.tql.episodes, 40);
  EXPECT_DOUBLE_EQ(cfg.opt.time_limit_s, 12.5);
  EXPECT_EQ(cfg.eval_window, 5);
  EXPECT_THROW(config_from_toml("[network]\nnum_device = 3\n"), std::invalid_argument);
  EXPECT_THROW(config_from_toml("[nets]\n"), std::invalid_argument);
  EXPECT_THROW(config_from_toml("[network]\ngroup_cap = 30\n"), std::invalid_argument);
  EXPECT_THROW(config_from_toml("[traffic]\nmin_kbits = 300\nmax_kbits = 200\n"), std::invalid_argument);
}

TEST(Toml, ShippedConfigsLoad) {
  const std::filesystem::path dir = NOMA_SOURCE_DIR "/configs";
  ASSERT_TRUE(std::filesystem::exists(dir));
  int loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".toml") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++loaded;
  }
  EXPECT_GT(loaded, 0);
}
