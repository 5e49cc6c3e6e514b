#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/net_model.hpp"

namespace noma {

double sinr(double power_mw, double gain, double interference);
// Shannon rate in bits/s.
double rate(double power_mw, double gain, double interference, double bandwidth_hz);
// Minimum SINR for delivering length_bits within one slot.
double success_threshold(std::int64_t length_bits, double bandwidth_hz,
                         double slot_duration_s = 1.0);

struct GroupMember {
  int device = 0;
  double power_mw = 0.0;
  double gain = 0.0;

  double received() const { return power_mw * gain; }
};

// Devices sharing one resource block. Members keep their input order;
// decode_order() ranks them for SIC by channel gain, highest first, with
// ties going to the higher device id.
class SlotGroup {
 public:
  SlotGroup() = default;
  SlotGroup(int slot, std::vector<GroupMember> members);

  int slot() const { return slot_; }
  const std::vector<GroupMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  // Indices into members(), first decoded first.
  const std::vector<std::size_t>& decode_order() const { return order_; }

  // Sum of received power over members ranked below `device`.
  double interference_for(int device) const;

 private:
  int slot_ = 0;
  std::vector<GroupMember> members_;
  std::vector<std::size_t> order_;
};

// True when (gain_a, device_a) ranks below (gain_b, device_b) in SIC order.
bool ranks_below(double gain_a, int device_a, double gain_b, int device_b);

// Success flag per member (aligned with group.members()); every lower-ranked
// transmitter interferes, whether or not it is itself decoded.
std::vector<bool> slot_success_flags(const SlotGroup& group,
                                     std::span<const std::int64_t> lengths_bits,
                                     double bandwidth_hz, double slot_duration_s = 1.0);

// Threshold-based variant used by the solvers; thresholds align with members().
std::vector<bool> slot_success_flags_by_threshold(const SlotGroup& group,
                                                  std::span<const double> thresholds);

// One device's choice in one frame.
struct Transmission {
  std::optional<int> slot;  // 0-based
  int level = 0;            // index into NetworkConfig::power_levels_dbm

  bool transmits(const NetworkConfig& config) const;
};

using FrameAssignment = std::vector<Transmission>;  // [device]
using Assignment = std::vector<FrameAssignment>;    // [frame][device]

FrameAssignment idle_frame(const NetworkConfig& config);

class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(int device, std::string constraint, const std::string& detail);

  int device() const { return device_; }
  const std::string& constraint() const { return constraint_; }

 private:
  int device_;
  std::string constraint_;
};

struct FrameDelivery {
  int count = 0;
  std::vector<bool> success;  // [device]
};

// Delivered packets in one frame. If more than G devices pick a slot, only
// the G highest-ranked are decodable; the rest still spend energy and
// interfere. A device with no packet is never counted.
FrameDelivery count_delivered(const FrameAssignment& assignment, const Scenario& scenario,
                              int frame);

// Energy spent by each device over the whole assignment.
std::vector<double> energy_spent(const Assignment& assignment, const NetworkConfig& config);

// Throws ConstraintViolation when some device exceeds its budget.
void check_energy(const Assignment& assignment, const NetworkConfig& config);

// Budget comparisons tolerate round-off in sums of mW costs.
inline constexpr double kEnergyTolerance = 1e-9;

}  // namespace noma
