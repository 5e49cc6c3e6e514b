#pragma once

#include <span>
#include <vector>

#include "noma/net_model.hpp"

namespace noma {

// A device that has an edge to the current slot.
struct SlotCandidate {
  int device = 0;
  double gain = 0.0;       // channel gain on this slot, fixes SIC rank
  double received = 0.0;   // power * gain
  double threshold = 0.0;  // 2^(L/W) - 1
};

struct FrameMatchResult {
  std::vector<std::vector<int>> groups;  // [slot] -> devices, in admission order
  int served_total = 0;
  std::vector<int> unserved;  // ascending device ids
};

// Unserved devices with a packet, positive power, slot inside the window and
// power * gain >= threshold on this slot.
std::vector<SlotCandidate> neighbors(int slot, std::span<const double> slot_gains,
                                     std::span<const double> powers_mw,
                                     std::span<const PacketTask> tasks,
                                     std::span<const double> thresholds,
                                     const std::vector<bool>& unserved);

// Lowest-gain-first admission: a candidate joins while
// received >= threshold * (1 + received power already admitted). Returns the
// first min(admitted, group_cap) admitted devices.
std::vector<int> greedy_slot(std::vector<SlotCandidate> candidates, int group_cap);

// Online frame matching. Slots must be fed in order; match_slot only ever
// sees the gains of the slot it decides, so the decision for slot j cannot
// depend on later slots.
class FrameMatcher {
 public:
  FrameMatcher(std::span<const PacketTask> tasks, std::span<const double> powers_mw,
               std::span<const double> thresholds, int num_slots, int group_cap);

  // slot_gains[i] is device i's gain on the next slot.
  const std::vector<int>& match_slot(std::span<const double> slot_gains);

  int next_slot() const { return next_slot_; }
  FrameMatchResult finish() const;

 private:
  std::vector<PacketTask> tasks_;
  std::vector<double> powers_;
  std::vector<double> thresholds_;
  int num_slots_;
  int group_cap_;
  int next_slot_ = 0;
  std::vector<bool> unserved_;
  std::vector<std::vector<int>> groups_;
};

// Runs FM over every slot of a frame with per-device transmit powers in mW
// (0 for devices that stay silent).
FrameMatchResult fm_frame(const Scenario& scenario, int frame, std::span<const double> powers_mw);

}  // namespace noma
