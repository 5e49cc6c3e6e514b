#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "fixtures.hpp"
#include "noma/opt.hpp"
#include "oracles.hpp"

using namespace noma;

namespace {

// A 1 mW level keeps received power equal to the gain.
Scenario unit_power(int devices, int slots, int frames, int group_cap) {
  auto s = fixture::blank(devices, slots, frames, group_cap);
  s.config.power_levels_dbm = {kOffLevelDbm, 0.0};
  return s;
}

std::size_t total_configs(const std::vector<std::vector<SlotConfig>>& per_slot) {
  std::size_t n = 0;
  for (const auto& s : per_slot) n += s.size();
  return n;
}

void expect_certified(const Scenario& s, const OptSolution& sol) {
  int delivered = 0;
  for (int t = 0; t < s.num_frames(); ++t) {
    const auto d = count_delivered(sol.assignment[t], s, t);
    delivered += d.count;
    // No wasted transmissions: every transmitter is served.
    for (int i = 0; i < s.num_devices(); ++i) {
      if (sol.assignment[t][i].transmits(s.config)) {
        EXPECT_TRUE(d.success[i]);
      }
    }
    int certified = 0;
    for (const auto& c : sol.certificate[t]) {
      certified += c.value();
      for (const auto& m : c.members) {
        ASSERT_TRUE(sol.assignment[t][m.device].slot.has_value());
        EXPECT_EQ(*sol.assignment[t][m.device].slot, c.slot);
        EXPECT_EQ(sol.assignment[t][m.device].level, m.level);
      }
    }
    EXPECT_EQ(certified, d.count);
  }
  EXPECT_EQ(delivered, sol.objective);
  EXPECT_NO_THROW(check_energy(sol.assignment, s.config));
}

}  // namespace

TEST(EnumerateConfigs, SingletonAtOneLevel) {
  auto s = fixture::blank(1, 1, 1, 1);
  // 23 dBm clears the unit threshold, 21 dBm does not.
  s.gain(0, 0, 0) = 1.0 / 150.0;
  const auto configs = enumerate_configs(s, 0);
  ASSERT_EQ(total_configs(configs), 1u);
  EXPECT_EQ(configs[0][0].members[0].level, 3);
}

TEST(EnumerateConfigs, PairsFromGreedyExample) {
  auto s = unit_power(3, 1, 1, 2);
  s.gain(0, 0, 0) = 4.0;
  s.gain(0, 1, 0) = 2.0;
  s.gain(0, 2, 0) = 1.0;
  std::set<std::uint64_t> masks;
  const auto configs = enumerate_configs(s, 0);
  for (const auto& c : configs[0]) {
    masks.insert(c.mask);
    EXPECT_LE(c.value(), 2);
    // Members listed from the lowest SIC rank up.
    for (std::size_t k = 1; k < c.members.size(); ++k) {
      EXPECT_LT(s.gain(0, c.members[k - 1].device, 0), s.gain(0, c.members[k].device, 0));
    }
  }
  EXPECT_EQ(masks, (std::set<std::uint64_t>{1, 2, 4, 3, 5, 6}));
}

TEST(EnumerateConfigs, InfeasibleSoloNeverAppears) {
  auto s = unit_power(3, 2, 1, 3);
  s.gain(0, 1, 0) = 0.5;
  s.gain(0, 1, 1) = 0.5;
  for (const auto& slot : enumerate_configs(s, 0)) {
    for (const auto& c : slot) EXPECT_FALSE(c.mask & 2u);
  }
}

TEST(EnumerateConfigs, EveryConfigDecodes) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NetworkConfig cfg;
    cfg.num_devices = 8;
    cfg.group_cap = 3;
    cfg.area_side_m = 800.0;
    const auto s = generate_scenario(cfg, RadioParams{}, TrafficSpec{}, seed);
    for (const auto& slot : enumerate_configs(s, 0)) {
      for (const auto& c : slot) {
        std::vector<oracle::Candidate> members;
        for (const auto& m : c.members) {
          EXPECT_TRUE(s.task(0, m.device).in_window(c.slot));
          EXPECT_NE(m.level, cfg.off_level_index());
          const double p = dbm_to_mw(cfg.power_levels_dbm[m.level]);
          members.push_back({m.device, s.gain(0, m.device, c.slot), p * s.gain(0, m.device, c.slot),
                             s.threshold(0, m.device)});
        }
        EXPECT_TRUE(oracle::group_feasible(members));
      }
    }
  }
}

TEST(EnumerateConfigs, CapIsEnforced) {
  const auto s = generate_scenario(NetworkConfig{}, RadioParams{}, TrafficSpec{}, 1);
  EXPECT_THROW(enumerate_configs(s, 0, 5), InstanceTooLarge);
  EXPECT_THROW(format_lp(s, 5), InstanceTooLarge);
}

TEST(SolveOffline, Trivial) {
  const auto s = fixture::blank(1, 1, 1, 1);
  const auto sol = solve_offline(s);
  EXPECT_EQ(sol.objective, 1);
  EXPECT_TRUE(sol.proven_optimal);
  expect_certified(s, sol);
}

TEST(BruteForceTiny, EdgeCases) {
  auto empty = fixture::blank(2, 2, 2, 2);
  for (auto& frame : empty.traffic) {
    for (auto& task : frame) task.length_bits = 0;
  }
  EXPECT_EQ(brute_force_tiny(empty), 0);
  EXPECT_EQ(solve_offline(empty).objective, 0);
  // One 23 dBm transmission fits the budget, two do not.
  const auto once = fixture::blank(1, 1, 2, 1, 250.0);
  auto costly = once;
  for (auto& g : costly.gains) g = 1.0 / 150.0;
  EXPECT_EQ(brute_force_tiny(costly), 1);
  EXPECT_EQ(solve_offline(costly).objective, 1);
  EXPECT_THROW(brute_force_tiny(generate_scenario(NetworkConfig{}, RadioParams{}, TrafficSpec{}, 1)),
               InstanceTooLarge);
}

// Optima from the exhaustive test oracle, frozen.
TEST(SolveOffline, FrozenOracleValues) {
  const std::pair<std::uint64_t, int> frozen[] = {
      {1, 1},  {2, 1},  {3, 0},  {4, 5},  {5, 4},  {6, 4},  {7, 0},  {8, 2},
      {9, 2},  {10, 0}, {11, 3}, {12, 1}, {13, 1}, {14, 1}, {15, 0}, {16, 2},
      {17, 0}, {18, 2}, {19, 2}, {20, 0}, {21, 1}, {22, 2}, {23, 3}, {24, 3}};
  for (const auto& [seed, value] : frozen) {
    const auto s = fixture::tiny(seed);
    EXPECT_EQ(solve_offline(s).objective, value) << "seed " << seed;
    EXPECT_EQ(brute_force_tiny(s), value) << "seed " << seed;
  }
}

TEST(SolveOffline, MatchesOracleOnTinyInstances) {
  int checked = 0;
  for (std::uint64_t seed = 100; checked < 60; ++seed) {
    const auto s = fixture::tiny(seed);
    if (std::pow(1 + 3.0 * s.num_slots(), s.num_devices() * s.num_frames()) > 3e5) continue;
    const int expected = oracle::exhaustive_optimum(s);
    const auto sol = solve_offline(s);
    EXPECT_EQ(sol.objective, expected) << "seed " << seed;
    expect_certified(s, sol);
    ++checked;
  }
}

TEST(SolveOffline, PruningDoesNotChangeTheOptimum) {
  OptOptions plain;
  plain.prune = false;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    NetworkConfig cfg;
    cfg.num_devices = 5 + static_cast<int>(seed % 3);
    cfg.num_slots = 2 + static_cast<int>(seed % 2);
    cfg.num_frames = 2 + static_cast<int>(seed % 2);
    cfg.group_cap = 1 + static_cast<int>(seed % 3);
    cfg.energy_budget = seed % 2 ? 250.0 : 420.0;
    cfg.area_side_m = seed % 3 ? 20.0 : 1000.0;
    const auto s = generate_scenario(cfg, RadioParams{}, TrafficSpec{}, seed);
    const auto a = solve_offline(s);
    const auto b = solve_offline(s, plain);
    EXPECT_EQ(a.objective, b.objective) << "seed " << seed;
    expect_certified(s, a);
    expect_certified(s, b);
  }
}

TEST(SolveOffline, ReferenceScaleCertificates) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    NetworkConfig cfg;
    cfg.group_cap = seed % 2 ? 2 : 8;
    const auto s = generate_scenario(cfg, RadioParams{}, TrafficSpec{100, 200}, seed);
    const auto sol = solve_offline(s);
    EXPECT_TRUE(sol.proven_optimal);
    expect_certified(s, sol);
    EXPECT_LE(sol.objective, s.num_frames() * cfg.frame_capacity());
  }
}

TEST(ExportIlp, VariableCountAndEmptyModel) {
  NetworkConfig cfg;
  cfg.num_devices = 3;
  cfg.num_slots = 2;
  cfg.num_frames = 2;
  const auto s = generate_scenario(cfg, RadioParams{}, TrafficSpec{}, 4);
  std::size_t configs = 0;
  for (int t = 0; t < s.num_frames(); ++t) configs += total_configs(enumerate_configs(s, t));
  const auto lp = format_lp(s);
  const auto binaries = lp.substr(lp.find("Binary"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(binaries.begin(), binaries.end(), 'x')), configs);
  EXPECT_NE(lp.find("Maximize"), std::string::npos);
  EXPECT_NE(lp.find("energy_d1:"), std::string::npos);

  auto empty = fixture::blank(2, 1, 1, 1);
  for (auto& task : empty.traffic[0]) task.length_bits = 0;
  const auto none = format_lp(empty);
  EXPECT_NE(none.find("obj: 0"), std::string::npos);
  EXPECT_EQ(none.find("Binary"), std::string::npos);
}
