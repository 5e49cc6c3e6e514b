#include "noma/opt.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace noma {

double SlotConfig::energy(const NetworkConfig& config) const {
  double total = 0.0;
  for (const auto& m : members) total += action_cost(config.power_levels_dbm[m.level]);
  return total;
}

namespace {

void enumerate_slot(const Scenario& scenario, int frame, int slot, std::span<const int> fixed,
                    std::size_t cap, std::size_t& total, std::vector<SlotConfig>& out) {
  const auto& cfg = scenario.config;
  const int off = cfg.off_level_index();

  std::vector<int> eligible;
  for (int i = 0; i < cfg.num_devices; ++i) {
    const auto& task = scenario.task(frame, i);
    if (!task.has_packet() || !task.in_window(slot)) continue;
    if (!fixed.empty() && fixed[i] == off) continue;
    eligible.push_back(i);
  }
  std::sort(eligible.begin(), eligible.end(), [&](int a, int b) {
    return ranks_below(scenario.gain(frame, a, slot), a, scenario.gain(frame, b, slot), b);
  });

  std::vector<ConfigMember> members;
  std::uint64_t mask = 0;
  // Members are added in increasing SIC rank, so a new member's condition
  // only involves the members already present and never disturbs theirs.
  std::function<void(std::size_t, double)> extend = [&](std::size_t start, double below) {
    for (std::size_t k = start; k < eligible.size(); ++k) {
      const int dev = eligible[k];
      const double gain = scenario.gain(frame, dev, slot);
      const double needed = scenario.threshold(frame, dev) * (1.0 + below);
      for (int level = 0; level < cfg.num_power_levels(); ++level) {
        if (level == off) continue;
        if (!fixed.empty() && fixed[dev] != level) continue;
        const double received = dbm_to_mw(cfg.power_levels_dbm[level]) * gain;
        if (received < needed) continue;
        members.push_back({dev, level});
        mask |= std::uint64_t{1} << dev;
        if (++total > cap) {
          throw InstanceTooLarge("instance too large for exact solver: more than " +
                                 std::to_string(cap) + " slot configurations");
        }
        out.push_back({slot, members, mask});
        if (static_cast<int>(members.size()) < cfg.group_cap) extend(k + 1, below + received);
        mask &= ~(std::uint64_t{1} << dev);
        members.pop_back();
      }
    }
  };
  extend(0, 0.0);
}

std::vector<std::vector<SlotConfig>> enumerate_impl(const Scenario& scenario, int frame,
                                                    std::span<const int> fixed, std::size_t cap) {
  if (frame < 0 || frame >= scenario.num_frames()) throw std::out_of_range("frame out of range");
  std::vector<std::vector<SlotConfig>> per_slot(scenario.num_slots());
  std::size_t total = 0;
  for (int j = 0; j < scenario.num_slots(); ++j) {
    enumerate_slot(scenario, frame, j, fixed, cap, total, per_slot[j]);
  }
  return per_slot;
}

struct Choice {
  std::uint64_t mask = 0;
  int value = 0;
  double energy = 0.0;
  std::size_t source = 0;  // index into the enumerated list of its slot
};

// Keeps, for each member set, only the power assignments that no other
// assignment of the same set beats on every member's cost.
std::vector<Choice> reduce(const std::vector<SlotConfig>& configs, const NetworkConfig& cfg) {
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_mask;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    bool affordable = true;
    for (const auto& m : configs[k].members) {
      affordable &= action_cost(cfg.power_levels_dbm[m.level]) <= cfg.energy_budget + kEnergyTolerance;
    }
    if (affordable) by_mask[configs[k].mask].push_back(k);
  }
  auto level_of = [&](std::size_t k, int dev) {
    for (const auto& m : configs[k].members) {
      if (m.device == dev) return m.level;
    }
    return -1;
  };
  std::vector<Choice> out;
  for (const auto& [mask, ids] : by_mask) {
    for (std::size_t a : ids) {
      bool dominated = false;
      for (std::size_t b : ids) {
        if (a == b) continue;
        bool all_le = true;
        bool some_lt = false;
        for (const auto& m : configs[a].members) {
          const int lb = level_of(b, m.device);
          all_le &= lb <= m.level;
          some_lt |= lb < m.level;
        }
        if (all_le && (some_lt || b < a)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) out.push_back({mask, configs[a].value(), configs[a].energy(cfg), a});
    }
  }
  std::sort(out.begin(), out.end(), [](const Choice& x, const Choice& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.energy != y.energy) return x.energy < y.energy;
    return x.source < y.source;
  });
  return out;
}

// Exact single-frame set packing, ignoring energy. rest(j, used) is the most
// devices slots j..N-1 can serve without reusing any device in `used`.
class FramePacker {
 public:
  FramePacker(std::vector<std::vector<SlotConfig>> configs, const NetworkConfig& cfg)
      : configs_(std::move(configs)) {
    const std::size_t n = configs_.size();
    choices_.reserve(n);
    for (const auto& slot : configs_) choices_.push_back(reduce(slot, cfg));
    reach_from_.assign(n + 1, 0);
    cap_from_.assign(n + 1, 0);
    for (std::size_t j = n; j-- > 0;) {
      std::uint64_t reach = 0;
      int top = 0;
      for (const auto& c : choices_[j]) {
        reach |= c.mask;
        top = std::max(top, c.value);
      }
      reach_from_[j] = reach_from_[j + 1] | reach;
      cap_from_[j] = cap_from_[j + 1] + top;
    }
    memo_.resize(n);
  }

  std::size_t num_slots() const { return configs_.size(); }
  const std::vector<Choice>& choices(std::size_t j) const { return choices_[j]; }
  const SlotConfig& config(std::size_t j, const Choice& c) const { return configs_[j][c.source]; }
  std::uint64_t reach_from(std::size_t j) const { return reach_from_[j]; }

  int quick_bound(std::size_t j, std::uint64_t used) const {
    return std::min(cap_from_[j], std::popcount(reach_from_[j] & ~used));
  }

  int rest(std::size_t j, std::uint64_t used) {
    if (j >= configs_.size()) return 0;
    used &= reach_from_[j];
    auto it = memo_[j].find(used);
    if (it != memo_[j].end()) return it->second;
    int best = rest(j + 1, used);
    const int ceiling = quick_bound(j, used);
    for (const auto& c : choices_[j]) {
      if (best >= ceiling) break;
      if (c.mask & used) continue;
      if (c.value + quick_bound(j + 1, used | c.mask) <= best) continue;
      best = std::max(best, c.value + rest(j + 1, used | c.mask));
    }
    memo_[j].emplace(used, best);
    return best;
  }

 private:
  std::vector<std::vector<SlotConfig>> configs_;
  std::vector<std::vector<Choice>> choices_;
  std::vector<std::uint64_t> reach_from_;
  std::vector<int> cap_from_;
  std::vector<std::unordered_map<std::uint64_t, int>> memo_;
};

// Single-frame packing where serving a device also pays a price per unit of
// energy. Used for the Lagrangian bound on the cross-frame energy budgets.
class PricedPacker {
 public:
  // Groups some member cannot pay for out of `budget` are left out.
  PricedPacker(const FramePacker& packer, const std::vector<double>& price,
               const NetworkConfig& cfg, const std::vector<double>* budget = nullptr)
      : packer_(packer) {
    const std::size_t n = packer.num_slots();
    worth_.resize(n);
    top_from_.assign(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
      double top = 0.0;
      for (const auto& c : packer.choices(j)) {
        double w = c.value;
        for (const auto& m : packer.config(j, c).members) {
          const double cost = action_cost(cfg.power_levels_dbm[m.level]);
          w -= price[m.device] * cost;
          if (budget && cost > (*budget)[m.device] + kEnergyTolerance) w = -1.0;
        }
        worth_[j].push_back(w);
        top = std::max(top, w);
      }
      top_from_[j] = top_from_[j + 1] + top;
    }
    memo_.resize(n);
  }

  double rest(std::size_t j, std::uint64_t used) {
    if (j >= worth_.size()) return 0.0;
    used &= packer_.reach_from(j);
    auto it = memo_[j].find(used);
    if (it != memo_[j].end()) return it->second;
    double best = rest(j + 1, used);
    const auto& choices = packer_.choices(j);
    for (std::size_t k = 0; k < choices.size(); ++k) {
      const double w = worth_[j][k];
      if (w <= 0.0 || (choices[k].mask & used)) continue;
      if (w + top_from_[j + 1] <= best) continue;
      best = std::max(best, w + rest(j + 1, used | choices[k].mask));
    }
    memo_[j].emplace(used, best);
    return best;
  }

  // Energy each device spends in one maximizing packing, and its groups.
  void spend(std::vector<double>& out, const NetworkConfig& cfg,
             std::vector<SlotConfig>* picked = nullptr) {
    std::uint64_t used = 0;
    for (std::size_t j = 0; j < worth_.size(); ++j) {
      const double here = rest(j, used);
      if (here <= 0.0 || here == rest(j + 1, used)) continue;
      const auto& choices = packer_.choices(j);
      for (std::size_t k = 0; k < choices.size(); ++k) {
        const double w = worth_[j][k];
        if (w <= 0.0 || (choices[k].mask & used)) continue;
        if (w + rest(j + 1, used | choices[k].mask) != here) continue;
        for (const auto& m : packer_.config(j, choices[k]).members) {
          out[m.device] += action_cost(cfg.power_levels_dbm[m.level]);
        }
        if (picked) picked->push_back(packer_.config(j, choices[k]));
        used |= choices[k].mask;
        break;
      }
    }
  }

 private:
  const FramePacker& packer_;
  std::vector<std::vector<double>> worth_;
  std::vector<double> top_from_;
  std::vector<std::unordered_map<std::uint64_t, double>> memo_;
};

// The power level each device uses in one packing of a frame (-1 when it is
// not served), with the groups that realize it.
struct Profile {
  int value = 0;
  double total_cost = 0.0;
  std::vector<int> level;
  std::vector<const SlotConfig*> groups;
};

class OfflineSolver {
 public:
  OfflineSolver(const Scenario& scenario, const OptOptions& options)
      : scenario_(scenario),
        options_(options),
        frames_(scenario.num_frames()),
        slots_(scenario.num_slots()),
        devices_(scenario.num_devices()) {
    const auto& cfg = scenario.config;
    std::size_t total = 0;
    for (int t = 0; t < frames_; ++t) {
      auto configs = enumerate_impl(scenario, t, {}, options.config_cap);
      for (const auto& slot : configs) total += slot.size();
      if (total > options.config_cap) {
        throw InstanceTooLarge("instance too large for exact solver: more than " +
                               std::to_string(options.config_cap) + " slot configurations");
      }
      packers_.emplace_back(std::move(configs), cfg);
    }
    frame_max_.assign(frames_, 0);
    frame_max_suffix_.assign(frames_ + 1, 0);
    for (int t = frames_ - 1; t >= 0; --t) {
      frame_max_[t] = packers_[t].rest(0, 0);
      frame_max_suffix_[t] = frame_max_suffix_[t + 1] + frame_max_[t];
    }
    for (double level : cfg.power_levels_dbm) cost_.push_back(action_cost(level));
    energy_.assign(devices_, cfg.energy_budget);
    chosen_.resize(frames_);
  }

  OptSolution solve() {
    start_ = std::chrono::steady_clock::now();
    if (options_.prune) {
      solve_pruned();
    } else {
      search_all(0, 0, 0, 0);
    }
    OptSolution sol;
    sol.objective = std::max(best_, 0);
    sol.proven_optimal = !timed_out_;
    sol.nodes = nodes_;
    sol.certificate = best_chosen_;
    sol.certificate.resize(frames_);
    sol.assignment.assign(frames_, idle_frame(scenario_.config));
    for (int t = 0; t < frames_; ++t) {
      for (const auto& cfg : sol.certificate[t]) {
        for (const auto& m : cfg.members) {
          sol.assignment[t][m.device] = Transmission{cfg.slot, m.level};
        }
      }
    }
    return sol;
  }

 private:
  void solve_pruned() {
    for (double scale : {0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0}) construct(scale);
    // Randomized restarts, stopped as soon as the frame bound is met.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> bias(devices_);
    for (int k = 0; k < 200 && best_ < frame_max_suffix_[0]; ++k) {
      for (auto& b : bias) b = unit(rng);
      construct(5.0 * unit(rng), &bias);
      if ((k & 15) == 15 && out_of_time_now()) return;
    }
    int upper = frame_max_suffix_[0];
    if (best_ < upper) upper = std::min(upper, dual_bound());
    // The first target that can be met is the optimum: every larger one was
    // refuted by exhaustion.
    for (int target = upper; target > best_ && !timed_out_; --target) {
      if (reach(target)) break;
    }
  }

  // Frame by frame, packs each frame as well as the remaining energy allows,
  // charging scale / remaining energy per unit spent so that scarce devices
  // are saved for later frames.
  void construct(double scale, const std::vector<double>* bias = nullptr) {
    const auto& cfg = scenario_.config;
    std::vector<double> left(devices_, cfg.energy_budget), price(devices_), spent;
    std::vector<std::vector<SlotConfig>> chosen(frames_);
    int total = 0;
    for (int t = 0; t < frames_; ++t) {
      for (int d = 0; d < devices_; ++d) {
        price[d] = scale * (bias ? (*bias)[d] : 1.0) / std::max(left[d], 1.0);
      }
      PricedPacker priced(packers_[t], price, cfg, &left);
      spent.assign(devices_, 0.0);
      priced.spend(spent, cfg, &chosen[t]);
      for (const auto& c : chosen[t]) total += c.value();
      for (int d = 0; d < devices_; ++d) left[d] -= spent[d];
    }
    if (total > best_) {
      best_ = total;
      best_chosen_ = std::move(chosen);
    }
  }

  // Lagrangian dual of the energy budgets: for prices >= 0,
  //   sum_d price_d * budget_d + sum_t max_packing sum (value - price * cost)
  // bounds the optimum. Prices are set by projected subgradient steps.
  double evaluate_prices(const std::vector<double>& price, std::vector<double>* spent) {
    const auto& cfg = scenario_.config;
    double bound = 0.0;
    for (int d = 0; d < devices_; ++d) bound += price[d] * cfg.energy_budget;
    if (spent) spent->assign(devices_, 0.0);
    for (int t = 0; t < frames_; ++t) {
      PricedPacker priced(packers_[t], price, cfg);
      bound += priced.rest(0, 0);
      if (spent) priced.spend(*spent, cfg);
    }
    return bound;
  }

  int dual_bound() {
    const double budget = scenario_.config.energy_budget;
    std::vector<double> price(devices_, 0.0), spent;
    double best_bound = evaluate_prices(price, &spent);
    std::vector<std::pair<double, std::vector<double>>> tried;
    double step_scale = 1.0;
    int stale = 0;
    for (int iter = 0; iter < 80 && best_bound - best_ > 1.0 - 1e-9; ++iter) {
      double norm = 0.0;
      for (int d = 0; d < devices_; ++d) {
        const double g = budget - spent[d];
        if (price[d] > 0.0 || g < 0.0) norm += g * g;
      }
      if (norm <= 0.0) break;
      const double bound = evaluate_prices(price, nullptr);
      const double step = step_scale * (bound - std::max(best_, 0)) / norm;
      for (int d = 0; d < devices_; ++d) {
        price[d] = std::max(0.0, price[d] - step * (budget - spent[d]));
      }
      const double next = evaluate_prices(price, &spent);
      tried.emplace_back(next, price);
      if (next < best_bound - 1e-9) {
        best_bound = next;
        stale = 0;
      } else if (++stale >= 4) {
        step_scale *= 0.5;
        stale = 0;
        if (step_scale < 1e-3) break;
      }
      if ((iter & 7) == 7 && out_of_time_now()) break;
    }
    // The tightest price vectors are reused to bound the exact search.
    std::stable_sort(tried.begin(), tried.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    prices_.clear();
    for (std::size_t k = 0; k < tried.size() && k < kPriceVectors; ++k) {
      prices_.push_back(std::move(tried[k].second));
    }
    return static_cast<int>(std::floor(best_bound + 1e-9));
  }

  // Distinct device power profiles of frame t's packings worth at least
  // `floor`, keeping only those no other profile beats on value and on every
  // device's cost at once.
  std::vector<Profile> collect_profiles(int t, int floor) {
    auto& packer = packers_[t];
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<Profile> found;
    std::string key(static_cast<std::size_t>(devices_), '\0');
    std::vector<const SlotConfig*> groups;
    std::function<void(std::size_t, std::uint64_t, int)> visit = [&](std::size_t j,
                                                                      std::uint64_t used,
                                                                      int value) {
      if (value + packer.rest(j, used) < floor) return;
      if ((++nodes_ & 0xfff) == 0 && out_of_time_now()) return;
      if (j == packer.num_slots()) {
        if (!seen.emplace(key, found.size()).second) return;
        Profile p;
        p.value = value;
        p.level.assign(devices_, -1);
        for (const auto* g : groups) {
          for (const auto& m : g->members) {
            p.level[m.device] = m.level;
            p.total_cost += cost_[m.level];
          }
        }
        p.groups = groups;
        found.push_back(std::move(p));
        return;
      }
      visit(j + 1, used, value);
      for (const auto& c : packer.choices(j)) {
        if (c.mask & used) continue;
        const auto& config = packer.config(j, c);
        for (const auto& m : config.members) key[m.device] = static_cast<char>(m.level + 1);
        groups.push_back(&config);
        visit(j + 1, used | c.mask, value + c.value);
        groups.pop_back();
        for (const auto& m : config.members) key[m.device] = '\0';
        if (timed_out_) return;
      }
    };
    visit(0, 0, 0);

    std::sort(found.begin(), found.end(), [](const Profile& a, const Profile& b) {
      if (a.value != b.value) return a.value > b.value;
      return a.total_cost < b.total_cost;
    });
    if (found.size() > kDominanceLimit) return found;
    auto cost_of = [&](const Profile& p, int d) { return p.level[d] < 0 ? 0.0 : cost_[p.level[d]]; };
    std::vector<Profile> kept;
    for (auto& p : found) {
      bool dominated = false;
      for (const auto& q : kept) {
        if (q.value < p.value) continue;
        bool cheaper = true;
        for (int d = 0; d < devices_ && cheaper; ++d) cheaper = cost_of(q, d) <= cost_of(p, d);
        if (cheaper) {
          dominated = true;
          break;
        }
      }
      if (!dominated) kept.push_back(std::move(p));
    }
    return kept;
  }

  // Is there a schedule delivering at least `target` packets? Each frame
  // may fall short of its own maximum by a share of the common slack.
  bool reach(int target) {
    const int slack = frame_max_suffix_[0] - target;
    profiles_.assign(frames_, {});
    for (int t = 0; t < frames_; ++t) {
      profiles_[t] = collect_profiles(t, frame_max_[t] - slack);
      if (timed_out_) return false;
    }
    order_.resize(frames_);
    for (int t = 0; t < frames_; ++t) order_[t] = t;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return profiles_[a].size() < profiles_[b].size();
    });
    prepare_bounds(slack);
    failed_.clear();
    picked_.assign(frames_, nullptr);
    priced_sum_.assign(prices_.size(), 0.0);
    return descend(0, slack, target);
  }

  // Tables for the bounds in descend(), indexed by the slack still unused:
  //   top_[k][t][s]    best priced worth of frame t under price vector k
  //   need_[t][s][d]   least energy device d spends in frame t
  void prepare_bounds(int slack) {
    const auto& cfg = scenario_.config;
    const double lowest = -std::numeric_limits<double>::infinity();
    const std::size_t kk = prices_.size();
    worth_.assign(kk, std::vector<std::vector<double>>(frames_));
    top_.assign(kk, std::vector<std::vector<double>>(frames_, std::vector<double>(slack + 1, lowest)));
    need_.assign(frames_, std::vector<std::vector<double>>(
                              slack + 1, std::vector<double>(devices_,
                                                             std::numeric_limits<double>::infinity())));
    base_.assign(kk, 0.0);
    for (std::size_t k = 0; k < kk; ++k) {
      for (int d = 0; d < devices_; ++d) base_[k] += prices_[k][d] * cfg.energy_budget;
    }
    for (int t = 0; t < frames_; ++t) {
      for (const auto& p : profiles_[t]) {
        const int loss = frame_max_[t] - p.value;
        for (std::size_t k = 0; k < kk; ++k) {
          double w = p.value;
          for (int d = 0; d < devices_; ++d) {
            if (p.level[d] >= 0) w -= prices_[k][d] * cost_[p.level[d]];
          }
          worth_[k][t].push_back(w);
          for (int s = loss; s <= slack; ++s) top_[k][t][s] = std::max(top_[k][t][s], w);
        }
        for (int s = loss; s <= slack; ++s) {
          for (int d = 0; d < devices_; ++d) {
            const double c = p.level[d] >= 0 ? cost_[p.level[d]] : 0.0;
            need_[t][s][d] = std::min(need_[t][s][d], c);
          }
        }
      }
    }
  }

  // True when frames order_[idx..] can no longer make up `target`.
  bool hopeless(int idx, int slack, int target) const {
    for (std::size_t k = 0; k < prices_.size(); ++k) {
      double bound = base_[k] + priced_sum_[k];
      for (int i = idx; i < frames_; ++i) bound += top_[k][order_[i]][slack];
      if (bound < target - 1e-9) return true;
    }
    for (int d = 0; d < devices_; ++d) {
      double must = 0.0;
      for (int i = idx; i < frames_; ++i) must += need_[order_[i]][slack][d];
      if (must > energy_[d] + kEnergyTolerance) return true;
    }
    return false;
  }

  bool descend(int idx, int slack, int target) {
    if (idx == frames_) {
      int total = 0;
      for (int t = 0; t < frames_; ++t) {
        total += picked_[t]->value;
        chosen_[t].clear();
        for (const auto* g : picked_[t]->groups) chosen_[t].push_back(*g);
      }
      if (total > best_) {
        best_ = total;
        best_chosen_ = chosen_;
      }
      return true;
    }
    ++nodes_;
    if (out_of_time()) return false;
    std::string key;
    key.reserve(sizeof(long long) * (devices_ + 2));
    auto append = [&](long long v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
    append(idx);
    append(slack);
    for (double e : energy_) append(std::llround(e * 1e6));
    if (failed_.contains(key)) return false;
    if (hopeless(idx, slack, target)) {
      failed_.insert(std::move(key));
      return false;
    }

    const int t = order_[idx];
    for (std::size_t n = 0; n < profiles_[t].size(); ++n) {
      const auto& p = profiles_[t][n];
      const int loss = frame_max_[t] - p.value;
      if (loss > slack) break;
      bool affordable = true;
      for (int d = 0; d < devices_ && affordable; ++d) {
        if (p.level[d] >= 0) affordable = cost_[p.level[d]] <= energy_[d] + kEnergyTolerance;
      }
      if (!affordable) continue;
      for (int d = 0; d < devices_; ++d) {
        if (p.level[d] >= 0) energy_[d] -= cost_[p.level[d]];
      }
      picked_[t] = &p;
      for (std::size_t k = 0; k < prices_.size(); ++k) priced_sum_[k] += worth_[k][t][n];
      const bool done = descend(idx + 1, slack - loss, target);
      for (std::size_t k = 0; k < prices_.size(); ++k) priced_sum_[k] -= worth_[k][t][n];
      for (int d = 0; d < devices_; ++d) {
        if (p.level[d] >= 0) energy_[d] += cost_[p.level[d]];
      }
      if (done) return true;
      if (timed_out_) return false;
    }
    failed_.insert(std::move(key));
    return false;
  }

  // Plain depth-first enumeration of every affordable choice, no bounds.
  void search_all(int t, int j, std::uint64_t used, int current) {
    ++nodes_;
    if (out_of_time()) return;
    if (t == frames_) {
      if (current > best_) {
        best_ = current;
        best_chosen_ = chosen_;
      }
      return;
    }
    if (j == slots_) {
      search_all(t + 1, 0, 0, current);
      return;
    }
    auto& packer = packers_[t];
    for (const auto& c : packer.choices(j)) {
      if (c.mask & used) continue;
      const auto& config = packer.config(j, c);
      bool affordable = true;
      for (const auto& m : config.members) {
        affordable &= cost_[m.level] <= energy_[m.device] + kEnergyTolerance;
      }
      if (!affordable) continue;
      for (const auto& m : config.members) energy_[m.device] -= cost_[m.level];
      chosen_[t].push_back(config);
      search_all(t, j + 1, used | c.mask, current + c.value);
      chosen_[t].pop_back();
      for (const auto& m : config.members) energy_[m.device] += cost_[m.level];
      if (timed_out_) return;
    }
    search_all(t, j + 1, used, current);
  }

  bool out_of_time_now() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed.count() > options_.time_limit_s) timed_out_ = true;
    return timed_out_;
  }

  bool out_of_time() {
    if ((nodes_ & 0xfff) == 0) out_of_time_now();
    return timed_out_;
  }

  static constexpr std::size_t kDominanceLimit = 20'000;
  static constexpr std::size_t kPriceVectors = 16;

  const Scenario& scenario_;
  OptOptions options_;
  int frames_, slots_, devices_;
  std::vector<FramePacker> packers_;
  std::vector<int> frame_max_, frame_max_suffix_;
  std::vector<double> cost_;
  std::vector<double> energy_;
  std::vector<std::vector<Profile>> profiles_;
  std::vector<int> order_;
  std::vector<const Profile*> picked_;
  std::vector<std::vector<double>> prices_;
  std::vector<double> base_, priced_sum_;
  std::vector<std::vector<std::vector<double>>> worth_, top_, need_;
  std::unordered_set<std::string> failed_;
  std::vector<std::vector<SlotConfig>> chosen_, best_chosen_;
  int best_ = -1;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::vector<std::vector<SlotConfig>> enumerate_configs(const Scenario& scenario, int frame,
                                                       std::size_t cap) {
  return enumerate_impl(scenario, frame, {}, cap);
}

std::vector<std::vector<SlotConfig>> enumerate_configs_fixed(const Scenario& scenario, int frame,
                                                             std::span<const int> levels,
                                                             std::size_t cap) {
  if (static_cast<int>(levels.size()) != scenario.num_devices()) {
    throw std::invalid_argument("one power level per device is required");
  }
  return enumerate_impl(scenario, frame, levels, cap);
}

OptSolution solve_offline(const Scenario& scenario, const OptOptions& options) {
  scenario.config.validate();
  OfflineSolver solver(scenario, options);
  return solver.solve();
}

int frame_optimum_fixed_powers(const Scenario& scenario, int frame, std::span<const int> levels,
                               std::size_t cap) {
  FramePacker packer(enumerate_configs_fixed(scenario, frame, levels, cap), scenario.config);
  return packer.rest(0, 0);
}

int brute_force_tiny(const Scenario& scenario, double max_space) {
  const auto& cfg = scenario.config;
  const int m = cfg.num_devices;
  const int frames = cfg.num_frames;
  const int off = cfg.off_level_index();

  // options[t * M + i]: every choice device i has in frame t.
  std::vector<std::vector<Transmission>> options(static_cast<std::size_t>(frames) * m);
  double space = 1.0;
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < m; ++i) {
      auto& opts = options[static_cast<std::size_t>(t) * m + i];
      opts.push_back({std::nullopt, off});
      for (int j = 0; j < cfg.num_slots; ++j) {
        if (!scenario.task(t, i).in_window(j)) continue;
        for (int level = 0; level < cfg.num_power_levels(); ++level) {
          if (level != off) opts.push_back({j, level});
        }
      }
      space *= static_cast<double>(opts.size());
    }
  }
  if (space > max_space) {
    throw InstanceTooLarge("brute force space of " + std::to_string(space) + " leaves exceeds " +
                           std::to_string(max_space));
  }

  std::vector<double> spent(m, 0.0);
  FrameAssignment frame_choice = idle_frame(cfg);
  int best = 0;
  std::function<void(int, int, int)> visit = [&](int t, int i, int delivered) {
    if (t == frames) {
      best = std::max(best, delivered);
      return;
    }
    if (i == m) {
      std::vector<int> per_slot(cfg.num_slots, 0);
      for (const auto& tx : frame_choice) {
        if (tx.slot) ++per_slot[*tx.slot];
      }
      for (int load : per_slot) {
        if (load > cfg.group_cap) return;
      }
      const int here = count_delivered(frame_choice, scenario, t).count;
      const FrameAssignment saved = frame_choice;
      visit(t + 1, 0, delivered + here);
      frame_choice = saved;
      return;
    }
    for (const auto& tx : options[static_cast<std::size_t>(t) * m + i]) {
      const double cost = tx.slot ? action_cost(cfg.power_levels_dbm[tx.level]) : 0.0;
      if (spent[i] + cost > cfg.energy_budget + kEnergyTolerance) continue;
      spent[i] += cost;
      frame_choice[i] = tx;
      visit(t, i + 1, delivered);
      spent[i] -= cost;
    }
    frame_choice[i] = {std::nullopt, off};
  };
  visit(0, 0, 0);
  return best;
}

}  // namespace noma
