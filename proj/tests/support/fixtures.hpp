#pragma once

#include <cstdint>
#include <random>

#include "noma/net_model.hpp"

namespace fixture {

// A hand-built scenario: every device has a packet of `kbits` valid in every
// slot and unit gain everywhere. Tests overwrite what they care about.
inline noma::Scenario blank(int devices, int slots, int frames, int group_cap,
                            double budget = 500.0, int kbits = 40) {
  noma::Scenario s;
  s.config.num_devices = devices;
  s.config.num_slots = slots;
  s.config.num_frames = frames;
  s.config.group_cap = group_cap;
  s.config.energy_budget = budget;
  s.positions.assign(devices, noma::Position{});
  s.traffic.assign(frames, std::vector<noma::PacketTask>(
                               devices, noma::PacketTask{kbits * 1000LL, 0, slots}));
  s.gains.assign(static_cast<std::size_t>(frames) * devices * slots, 1.0);
  return s;
}

// Random tiny instance (M <= 4, N <= 2, T <= 2). The deployment square and
// the budget vary so that feasibility and energy both bind some of the time.
inline noma::Scenario tiny(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  noma::NetworkConfig cfg;
  cfg.num_devices = pick(1, 4);
  cfg.num_slots = pick(1, 2);
  cfg.num_frames = pick(1, 2);
  cfg.group_cap = pick(1, cfg.num_devices);
  const double budgets[] = {0.0, 60.0, 150.0, 250.0, 500.0};
  cfg.energy_budget = budgets[pick(0, 4)];
  const double sides[] = {20.0, 400.0, 1200.0, 2500.0};
  cfg.area_side_m = sides[pick(0, 3)];
  noma::TrafficSpec traffic;
  traffic.max_kbits = 100 * pick(1, 5);
  return noma::generate_scenario(cfg, noma::RadioParams{}, traffic, seed);
}

}  // namespace fixture
