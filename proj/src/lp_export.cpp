#include <fstream>
#include <map>
#include <sstream>

#include "noma/opt.hpp"

namespace noma {

namespace {

// Appends " + c x_k" terms, wrapping long rows.
class RowWriter {
 public:
  explicit RowWriter(std::ostringstream& os) : os_(os) {}

  void term(double coefficient, std::size_t var) {
    if (count_ > 0) os_ << " +";
    if (count_ > 0 && count_ % 8 == 0) os_ << "\n   ";
    os_ << ' ';
    if (coefficient != 1.0) os_ << coefficient << ' ';
    os_ << 'x' << var;
    ++count_;
  }
  std::size_t count() const { return count_; }

 private:
  std::ostringstream& os_;
  std::size_t count_ = 0;
};

}  // namespace

std::string format_lp(const Scenario& scenario, std::size_t cap) {
  const auto& cfg = scenario.config;
  struct Var {
    int frame;
    SlotConfig config;
  };
  std::vector<Var> vars;
  std::size_t total = 0;
  for (int t = 0; t < cfg.num_frames; ++t) {
    auto per_slot = enumerate_configs(scenario, t, cap);
    for (auto& slot : per_slot) {
      total += slot.size();
      if (total > cap) {
        throw InstanceTooLarge("instance too large for exact solver: more than " +
                               std::to_string(cap) + " slot configurations");
      }
      for (auto& c : slot) vars.push_back({t, std::move(c)});
    }
  }

  std::ostringstream os;
  os.precision(17);
  os << "\\ NOMA grouping and power allocation: one binary per (resource block, group)\n";
  os << "Maximize\n obj:";
  if (vars.empty()) {
    os << " 0";
  } else {
    RowWriter obj(os);
    for (std::size_t k = 0; k < vars.size(); ++k) obj.term(vars[k].config.value(), k);
  }
  os << "\nSubject To\n";

  std::map<std::pair<int, int>, std::vector<std::size_t>> per_block;
  std::map<std::pair<int, int>, std::vector<std::size_t>> per_device_frame;
  std::map<int, std::vector<std::pair<double, std::size_t>>> per_device_energy;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const auto& v = vars[k];
    per_block[{v.frame, v.config.slot}].push_back(k);
    for (const auto& m : v.config.members) {
      per_device_frame[{m.device, v.frame}].push_back(k);
      per_device_energy[m.device].emplace_back(action_cost(cfg.power_levels_dbm[m.level]), k);
    }
  }
  for (const auto& [key, ids] : per_block) {
    os << " rb_t" << key.first + 1 << "_s" << key.second + 1 << ':';
    RowWriter row(os);
    for (auto k : ids) row.term(1.0, k);
    os << " <= 1\n";
  }
  for (const auto& [key, ids] : per_device_frame) {
    os << " once_d" << key.first + 1 << "_t" << key.second + 1 << ':';
    RowWriter row(os);
    for (auto k : ids) row.term(1.0, k);
    os << " <= 1\n";
  }
  for (const auto& [device, terms] : per_device_energy) {
    os << " energy_d" << device + 1 << ':';
    RowWriter row(os);
    for (const auto& [cost, k] : terms) row.term(cost, k);
    os << " <= " << cfg.energy_budget << '\n';
  }
  if (!vars.empty()) {
    os << "Binary\n";
    for (std::size_t k = 0; k < vars.size(); ++k) os << " x" << k << '\n';
  }
  os << "End\n";
  return os.str();
}

void export_ilp(const Scenario& scenario, const std::filesystem::path& path, std::size_t cap) {
  const std::string text = format_lp(scenario, cap);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace noma
