#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/net_model.hpp"
#include "noma/sinr.hpp"

namespace noma {

struct ConfigMember {
  int device = 0;
  int level = 0;  // index into the power set, never the off level
};

// A jointly decodable group on one resource block. Members are listed from
// the lowest SIC rank up.
struct SlotConfig {
  int slot = 0;
  std::vector<ConfigMember> members;
  std::uint64_t mask = 0;  // bit i set when device i is a member

  int value() const { return static_cast<int>(members.size()); }
  double energy(const NetworkConfig& config) const;
};

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultConfigCap = 1'000'000;

// Every non-empty feasible group of at most G devices for each slot of a
// frame, with every combination of non-off power levels that satisfies the
// SINR condition for all members. The empty group is implicit.
std::vector<std::vector<SlotConfig>> enumerate_configs(const Scenario& scenario, int frame,
                                                       std::size_t cap = kDefaultConfigCap);

// Same, but each device may only use levels[device] (the off level excludes it).
std::vector<std::vector<SlotConfig>> enumerate_configs_fixed(const Scenario& scenario, int frame,
                                                             std::span<const int> levels,
                                                             std::size_t cap = kDefaultConfigCap);

struct OptOptions {
  std::size_t config_cap = kDefaultConfigCap;
  double time_limit_s = 60.0;
  bool prune = true;
};

struct OptSolution {
  int objective = 0;
  Assignment assignment;                          // [frame][device]
  std::vector<std::vector<SlotConfig>> certificate;  // [frame] chosen groups
  bool proven_optimal = true;
  std::uint64_t nodes = 0;
};

// Exact offline optimum by depth-first branch and bound over the per-slot
// groups of every frame, with per-device energy tracked across frames.
// Energy is only charged for groups that are served.
OptSolution solve_offline(const Scenario& scenario, const OptOptions& options = {});

// Most packets one frame can deliver when every device is held to a fixed
// power level.
int frame_optimum_fixed_powers(const Scenario& scenario, int frame, std::span<const int> levels,
                               std::size_t cap = kDefaultConfigCap);

// Exhaustive search over every (slot or none, power) choice of every device
// in every frame. Throws InstanceTooLarge past max_space leaves.
int brute_force_tiny(const Scenario& scenario, double max_space = 1e7);

// Writes the set-packing model in CPLEX LP format.
std::string format_lp(const Scenario& scenario, std::size_t cap = kDefaultConfigCap);
void export_ilp(const Scenario& scenario, const std::filesystem::path& path,
                std::size_t cap = kDefaultConfigCap);

}  // namespace noma
