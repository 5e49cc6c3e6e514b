#include "noma/sinr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace noma {

double sinr(double power_mw, double gain, double interference) {
  return power_mw * gain / (1.0 + interference);
}

double rate(double power_mw, double gain, double interference, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + sinr(power_mw, gain, interference));
}

double success_threshold(std::int64_t length_bits, double bandwidth_hz, double slot_duration_s) {
  return std::exp2(static_cast<double>(length_bits) / (bandwidth_hz * slot_duration_s)) - 1.0;
}

bool ranks_below(double gain_a, int device_a, double gain_b, int device_b) {
  if (gain_a != gain_b) return gain_a < gain_b;
  return device_a < device_b;
}

SlotGroup::SlotGroup(int slot, std::vector<GroupMember> members)
    : slot_(slot), members_(std::move(members)), order_(members_.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    return ranks_below(members_[b].gain, members_[b].device, members_[a].gain,
                       members_[a].device);
  });
}

double SlotGroup::interference_for(int device) const {
  auto it = std::find_if(members_.begin(), members_.end(),
                         [device](const GroupMember& m) { return m.device == device; });
  if (it == members_.end()) {
    throw std::invalid_argument("device " + std::to_string(device) + " is not in the group");
  }
  double total = 0.0;
  for (const auto& m : members_) {
    if (ranks_below(m.gain, m.device, it->gain, it->device)) total += m.received();
  }
  return total;
}

std::vector<bool> slot_success_flags_by_threshold(const SlotGroup& group,
                                                  std::span<const double> thresholds) {
  const auto& members = group.members();
  if (thresholds.size() != members.size()) {
    throw std::invalid_argument("one threshold per group member is required");
  }
  std::vector<bool> flags(members.size(), false);
  // Walk from the weakest member up, accumulating interference.
  const auto& order = group.decode_order();
  double below = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& m = members[*it];
    flags[*it] = m.received() >= thresholds[*it] * (1.0 + below);
    below += m.received();
  }
  return flags;
}

std::vector<bool> slot_success_flags(const SlotGroup& group,
                                     std::span<const std::int64_t> lengths_bits,
                                     double bandwidth_hz, double slot_duration_s) {
  if (lengths_bits.size() != group.size()) {
    throw std::invalid_argument("one length per group member is required");
  }
  std::vector<double> thresholds;
  thresholds.reserve(lengths_bits.size());
  for (auto len : lengths_bits) {
    thresholds.push_back(success_threshold(len, bandwidth_hz, slot_duration_s));
  }
  return slot_success_flags_by_threshold(group, thresholds);
}

bool Transmission::transmits(const NetworkConfig& config) const {
  return slot.has_value() && dbm_to_mw(config.power_levels_dbm[level]) > 0.0;
}

FrameAssignment idle_frame(const NetworkConfig& config) {
  return FrameAssignment(config.num_devices, Transmission{std::nullopt, config.off_level_index()});
}

ConstraintViolation::ConstraintViolation(int device, std::string constraint,
                                         const std::string& detail)
    : std::runtime_error("device " + std::to_string(device) + " violates " + constraint + ": " +
                         detail),
      device_(device),
      constraint_(std::move(constraint)) {}

FrameDelivery count_delivered(const FrameAssignment& assignment, const Scenario& scenario,
                              int frame) {
  const auto& cfg = scenario.config;
  const int m = cfg.num_devices;
  if (static_cast<int>(assignment.size()) != m) {
    throw std::invalid_argument("frame assignment must have one entry per device");
  }

  std::vector<std::vector<GroupMember>> by_slot(cfg.num_slots);
  for (int i = 0; i < m; ++i) {
    const auto& tx = assignment[i];
    if (tx.level < 0 || tx.level >= cfg.num_power_levels()) {
      throw ConstraintViolation(i, "power-level", "power level index out of range");
    }
    if (!tx.slot) {
      if (dbm_to_mw(cfg.power_levels_dbm[tx.level]) > 0.0) {
        throw ConstraintViolation(i, "power-without-slot", "positive power without a slot");
      }
      continue;
    }
    const int j = *tx.slot;
    if (j < 0 || j >= cfg.num_slots) {
      throw ConstraintViolation(i, "slot-range", "slot " + std::to_string(j + 1) + " does not exist");
    }
    if (!scenario.task(frame, i).in_window(j)) {
      throw ConstraintViolation(i, "window",
                                "slot " + std::to_string(j + 1) + " is outside its window");
    }
    const double p = dbm_to_mw(cfg.power_levels_dbm[tx.level]);
    if (p > 0.0) by_slot[j].push_back({i, p, scenario.gain(frame, i, j)});
  }

  FrameDelivery out;
  out.success.assign(m, false);
  for (int j = 0; j < cfg.num_slots; ++j) {
    if (by_slot[j].empty()) continue;
    SlotGroup group(j, std::move(by_slot[j]));
    const auto& members = group.members();
    const auto& order = group.decode_order();
    std::vector<double> below(members.size(), 0.0);
    double acc = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      below[*it] = acc;
      acc += members[*it].received();
    }
    const std::size_t decodable = std::min(order.size(), static_cast<std::size_t>(cfg.group_cap));
    for (std::size_t k = 0; k < decodable; ++k) {
      const auto& mem = members[order[k]];
      if (!scenario.task(frame, mem.device).has_packet()) continue;
      if (mem.received() >= scenario.threshold(frame, mem.device) * (1.0 + below[order[k]])) {
        out.success[mem.device] = true;
        ++out.count;
      }
    }
  }
  return out;
}

std::vector<double> energy_spent(const Assignment& assignment, const NetworkConfig& config) {
  std::vector<double> spent(config.num_devices, 0.0);
  for (const auto& frame : assignment) {
    for (int i = 0; i < config.num_devices; ++i) {
      if (frame[i].transmits(config)) {
        spent[i] += action_cost(config.power_levels_dbm[frame[i].level]);
      }
    }
  }
  return spent;
}

void check_energy(const Assignment& assignment, const NetworkConfig& config) {
  const auto spent = energy_spent(assignment, config);
  for (int i = 0; i < config.num_devices; ++i) {
    if (spent[i] > config.energy_budget + kEnergyTolerance) {
      throw ConstraintViolation(i, "energy",
                                "spends " + std::to_string(spent[i]) + " of a budget of " +
                                    std::to_string(config.energy_budget));
    }
  }
}

}  // namespace noma
