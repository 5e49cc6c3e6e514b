#include "noma/net_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace noma {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= kFnvPrime;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(v));
  }
  std::uint64_t result() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffset;
};

std::uint64_t fnv(std::string_view s) {
  Fnv1a h;
  h.bytes(s.data(), s.size());
  return h.result();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<Position> draw_positions(const NetworkConfig& config, std::uint64_t seed) {
  auto rng = make_stream(seed, "positions", 0);
  const double half = config.area_side_m / 2.0;
  std::uniform_real_distribution<double> coord(-half, half);
  std::vector<Position> positions(config.num_devices);
  for (auto& p : positions) {
    p.x_m = coord(rng);
    p.y_m = coord(rng);
  }
  return positions;
}

std::vector<PacketTask> draw_traffic(const NetworkConfig& config, const TrafficSpec& spec,
                                     std::uint64_t seed, int frame) {
  auto rng = make_stream(seed, "traffic", static_cast<std::uint64_t>(frame));
  const int n = config.num_slots;
  std::uniform_int_distribution<int> length_kbits(spec.min_kbits, spec.max_kbits);
  std::vector<PacketTask> tasks(config.num_devices);
  for (auto& task : tasks) {
    task.length_bits = static_cast<std::int64_t>(length_kbits(rng)) * 1000;
    // 1-based a ~ unif{1..N}, d ~ unif{a+1..N+1}.
    const int a = std::uniform_int_distribution<int>(1, n)(rng);
    const int d = std::uniform_int_distribution<int>(a + 1, n + 1)(rng);
    task.arrival = a - 1;
    task.deadline = d - 1;
  }
  return tasks;
}

Scenario assemble(const NetworkConfig& config, const RadioParams& radio,
                  const TrafficSpec& spec, std::vector<Position> positions,
                  std::uint64_t seed) {
  Scenario s;
  s.config = config;
  s.radio = radio;
  s.positions = std::move(positions);
  s.seed = seed;
  s.traffic.reserve(config.num_frames);
  for (int t = 0; t < config.num_frames; ++t) {
    s.traffic.push_back(draw_traffic(config, spec, seed, t));
  }
  regenerate_gains(s);
  return s;
}

}  // namespace

void NetworkConfig::validate() const {
  if (num_devices < 1) throw std::invalid_argument("num_devices must be >= 1");
  if (num_devices > 64) throw std::invalid_argument("num_devices must be <= 64");
  if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
  if (num_frames < 1) throw std::invalid_argument("num_frames must be >= 1");
  if (group_cap < 1 || group_cap > num_devices) {
    throw std::invalid_argument("group_cap must satisfy 1 <= G <= M");
  }
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (power_levels_dbm.empty()) throw std::invalid_argument("power set is empty");
  if (!std::is_sorted(power_levels_dbm.begin(), power_levels_dbm.end()) ||
      std::adjacent_find(power_levels_dbm.begin(), power_levels_dbm.end()) !=
          power_levels_dbm.end()) {
    throw std::invalid_argument("power levels must be strictly ascending");
  }
  if (std::count(power_levels_dbm.begin(), power_levels_dbm.end(), kOffLevelDbm) != 1) {
    throw std::invalid_argument("power set must contain exactly one off level (-100 dBm)");
  }
  if (!(energy_budget >= 0.0)) throw std::invalid_argument("energy budget must be >= 0");
  if (!(area_side_m >= 0.0)) throw std::invalid_argument("area side must be >= 0");
  if (!(slot_duration_s > 0.0)) throw std::invalid_argument("slot duration must be positive");
}

int NetworkConfig::off_level_index() const {
  auto it = std::find(power_levels_dbm.begin(), power_levels_dbm.end(), kOffLevelDbm);
  if (it == power_levels_dbm.end()) throw std::invalid_argument("power set has no off level");
  return static_cast<int>(it - power_levels_dbm.begin());
}

int NetworkConfig::frame_capacity() const {
  return std::min(num_devices, num_slots * group_cap);
}

void RadioParams::validate() const {
  if (!(min_distance_km > 0.0)) throw std::invalid_argument("min_distance_km must be positive");
  if (!(noise_psd_dbm_hz < 0.0)) throw std::invalid_argument("noise_psd must be negative");
}

void TrafficSpec::validate() const {
  if (min_kbits < 0) throw std::invalid_argument("L_min must be >= 0");
  if (min_kbits > max_kbits) throw std::invalid_argument("L_min must not exceed L_max");
}

double Position::distance_km() const { return std::hypot(x_m, y_m) / 1000.0; }

double Scenario::gain(int frame, int device, int slot) const {
  const auto m = static_cast<std::size_t>(config.num_devices);
  const auto n = static_cast<std::size_t>(config.num_slots);
  return gains[(static_cast<std::size_t>(frame) * m + device) * n + slot];
}

double& Scenario::gain(int frame, int device, int slot) {
  const auto m = static_cast<std::size_t>(config.num_devices);
  const auto n = static_cast<std::size_t>(config.num_slots);
  return gains[(static_cast<std::size_t>(frame) * m + device) * n + slot];
}

std::span<const double> Scenario::gain_row(int frame, int device) const {
  const auto m = static_cast<std::size_t>(config.num_devices);
  const auto n = static_cast<std::size_t>(config.num_slots);
  return {gains.data() + (static_cast<std::size_t>(frame) * m + device) * n, n};
}

double Scenario::threshold(int frame, int device) const {
  const auto bits = static_cast<double>(task(frame, device).length_bits);
  return std::exp2(bits / (config.bandwidth_hz * config.slot_duration_s)) - 1.0;
}

std::uint64_t Scenario::digest() const {
  Fnv1a h;
  h.value(config.num_devices);
  h.value(config.num_slots);
  h.value(config.num_frames);
  h.value(config.group_cap);
  h.value(config.bandwidth_hz);
  for (double p : config.power_levels_dbm) h.value(p);
  h.value(config.energy_budget);
  h.value(config.area_side_m);
  h.value(config.slot_duration_s);
  h.value(radio);
  for (const auto& p : positions) h.value(p);
  for (const auto& frame : traffic) {
    for (const auto& task : frame) {
      h.value(task.length_bits);
      h.value(task.arrival);
      h.value(task.deadline);
    }
  }
  for (double g : gains) h.value(g);
  h.value(seed);
  return h.result();
}

double dbm_to_mw(double level_dbm) {
  if (level_dbm <= kOffLevelDbm) return 0.0;
  return std::pow(10.0, level_dbm / 10.0);
}

double action_cost(double level_dbm) { return dbm_to_mw(level_dbm); }

double path_loss_db(double dist_km, const RadioParams& radio) {
  const double d = std::max(dist_km, radio.min_distance_km);
  return radio.pathloss_intercept_db + radio.pathloss_slope_db * std::log10(d) +
         radio.antenna_gain_db + radio.penetration_loss_db;
}

double noise_power_dbm(const RadioParams& radio, double bandwidth_hz) {
  return radio.noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + radio.noise_figure_db;
}

double normalized_gain(double dist_km, double fading, const RadioParams& radio,
                       double bandwidth_hz) {
  // Received mW per transmitted mW, divided by the noise power in mW.
  const double db = -path_loss_db(dist_km, radio) - noise_power_dbm(radio, bandwidth_hz);
  return fading * std::pow(10.0, db / 10.0);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::string_view purpose,
                            std::uint64_t index) {
  const std::uint64_t tag = fnv(purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t realization) {
  if (realization == 0) return seed;
  return splitmix64(seed ^ splitmix64(realization));
}

std::vector<double> draw_channel_gains(const Scenario& scenario, int frame,
                                       std::mt19937_64& rng) {
  const auto& cfg = scenario.config;
  if (frame < 0 || frame >= cfg.num_frames) throw std::out_of_range("frame out of range");
  std::exponential_distribution<double> fading(1.0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.num_devices) * cfg.num_slots);
  for (int i = 0; i < cfg.num_devices; ++i) {
    const double dist = scenario.positions[i].distance_km();
    for (int j = 0; j < cfg.num_slots; ++j) {
      double f = fading(rng);
      // Exponential draws of exactly 0 are possible in principle; gains stay positive.
      if (f <= 0.0) f = std::numeric_limits<double>::min();
      out.push_back(normalized_gain(dist, f, scenario.radio, cfg.bandwidth_hz));
    }
  }
  return out;
}

void regenerate_gains(Scenario& scenario) {
  const auto& cfg = scenario.config;
  scenario.gains.clear();
  scenario.gains.reserve(static_cast<std::size_t>(cfg.num_frames) * cfg.num_devices *
                         cfg.num_slots);
  for (int t = 0; t < cfg.num_frames; ++t) {
    auto rng = make_stream(scenario.seed, "fading", static_cast<std::uint64_t>(t));
    auto frame_gains = draw_channel_gains(scenario, t, rng);
    scenario.gains.insert(scenario.gains.end(), frame_gains.begin(), frame_gains.end());
  }
}

Scenario generate_scenario(const NetworkConfig& config, const RadioParams& radio,
                           const TrafficSpec& traffic, std::uint64_t seed) {
  config.validate();
  radio.validate();
  traffic.validate();
  if (!(config.area_side_m > 0.0)) throw std::invalid_argument("deployment square has zero area");
  return assemble(config, radio, traffic, draw_positions(config, seed), seed);
}

ScenarioStream::ScenarioStream(NetworkConfig config, RadioParams radio, TrafficSpec traffic,
                               std::uint64_t seed)
    : config_(std::move(config)), radio_(radio), traffic_(traffic), seed_(seed) {
  config_.validate();
  radio_.validate();
  traffic_.validate();
  if (!(config_.area_side_m > 0.0)) {
    throw std::invalid_argument("deployment square has zero area");
  }
  positions_ = draw_positions(config_, seed_);
}

Scenario ScenarioStream::realization(int index) const {
  if (index < 0) throw std::out_of_range("negative realization index");
  return assemble(config_, radio_, traffic_, positions_,
                  derive_seed(seed_, static_cast<std::uint64_t>(index)));
}

}  // namespace noma
