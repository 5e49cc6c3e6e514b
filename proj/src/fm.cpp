#include "noma/fm.hpp"

#include <algorithm>
#include <stdexcept>

#include "noma/sinr.hpp"

namespace noma {

std::vector<SlotCandidate> neighbors(int slot, std::span<const double> slot_gains,
                                     std::span<const double> powers_mw,
                                     std::span<const PacketTask> tasks,
                                     std::span<const double> thresholds,
                                     const std::vector<bool>& unserved) {
  std::vector<SlotCandidate> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!unserved[i] || !tasks[i].has_packet() || !(powers_mw[i] > 0.0)) continue;
    if (!tasks[i].in_window(slot)) continue;
    const double received = powers_mw[i] * slot_gains[i];
    if (received >= thresholds[i]) {
      out.push_back({static_cast<int>(i), slot_gains[i], received, thresholds[i]});
    }
  }
  return out;
}

std::vector<int> greedy_slot(std::vector<SlotCandidate> candidates, int group_cap) {
  std::sort(candidates.begin(), candidates.end(),
            [](const SlotCandidate& a, const SlotCandidate& b) {
              return ranks_below(a.gain, a.device, b.gain, b.device);
            });
  std::vector<int> admitted;
  double admitted_power = 0.0;
  for (const auto& c : candidates) {
    if (c.received >= c.threshold * (1.0 + admitted_power)) {
      admitted.push_back(c.device);
      admitted_power += c.received;
    }
  }
  if (static_cast<int>(admitted.size()) > group_cap) admitted.resize(group_cap);
  return admitted;
}

FrameMatcher::FrameMatcher(std::span<const PacketTask> tasks, std::span<const double> powers_mw,
                           std::span<const double> thresholds, int num_slots, int group_cap)
    : tasks_(tasks.begin(), tasks.end()),
      powers_(powers_mw.begin(), powers_mw.end()),
      thresholds_(thresholds.begin(), thresholds.end()),
      num_slots_(num_slots),
      group_cap_(group_cap),
      unserved_(tasks.size(), true) {
  if (powers_.size() != tasks_.size() || thresholds_.size() != tasks_.size()) {
    throw std::invalid_argument("tasks, powers and thresholds must have equal length");
  }
  groups_.reserve(num_slots_);
}

const std::vector<int>& FrameMatcher::match_slot(std::span<const double> slot_gains) {
  if (next_slot_ >= num_slots_) throw std::logic_error("all slots of the frame are matched");
  if (slot_gains.size() != tasks_.size()) {
    throw std::invalid_argument("one gain per device is required");
  }
  auto group = greedy_slot(
      neighbors(next_slot_, slot_gains, powers_, tasks_, thresholds_, unserved_), group_cap_);
  for (int i : group) unserved_[i] = false;
  groups_.push_back(std::move(group));
  ++next_slot_;
  return groups_.back();
}

FrameMatchResult FrameMatcher::finish() const {
  FrameMatchResult result;
  result.groups = groups_;
  result.groups.resize(num_slots_);
  for (const auto& g : result.groups) result.served_total += static_cast<int>(g.size());
  for (std::size_t i = 0; i < unserved_.size(); ++i) {
    if (unserved_[i]) result.unserved.push_back(static_cast<int>(i));
  }
  return result;
}

FrameMatchResult fm_frame(const Scenario& scenario, int frame, std::span<const double> powers_mw) {
  const int m = scenario.num_devices();
  const int n = scenario.num_slots();
  if (static_cast<int>(powers_mw.size()) != m) {
    throw std::invalid_argument("one power per device is required");
  }
  std::vector<double> thresholds(m);
  for (int i = 0; i < m; ++i) thresholds[i] = scenario.threshold(frame, i);

  FrameMatcher matcher(scenario.traffic[frame], powers_mw, thresholds, n,
                       scenario.config.group_cap);
  std::vector<double> column(m);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) column[i] = scenario.gain(frame, i, j);
    matcher.match_slot(column);
  }
  return matcher.finish();
}

}  // namespace noma
