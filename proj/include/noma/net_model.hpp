#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace noma {

// The power level that stands for "no transmission". It is charged zero
// energy and maps to exactly 0 mW.
inline constexpr double kOffLevelDbm = -100.0;

struct NetworkConfig {
  int num_devices = 20;
  int num_slots = 5;
  int num_frames = 5;
  int group_cap = 2;
  double bandwidth_hz = 40e3;
  // Sorted ascending; exactly one entry equals kOffLevelDbm.
  std::vector<double> power_levels_dbm{kOffLevelDbm, 17.0, 21.0, 23.0};
  // Battery budget per device in mW x frame units.
  double energy_budget = 500.0;
  double area_side_m = 20.0;
  double slot_duration_s = 1.0;

  void validate() const;
  int num_power_levels() const { return static_cast<int>(power_levels_dbm.size()); }
  int off_level_index() const;
  int max_level_index() const { return num_power_levels() - 1; }
  // min(M, N*G): the most packets a single frame can deliver.
  int frame_capacity() const;
};

struct RadioParams {
  double carrier_freq_mhz = 900.0;
  double pathloss_intercept_db = 120.9;
  double pathloss_slope_db = 37.6;
  double antenna_gain_db = -4.0;
  double penetration_loss_db = 10.0;
  double noise_figure_db = 5.0;
  double noise_psd_dbm_hz = -174.0;
  double min_distance_km = 0.001;

  void validate() const;
};

// Packet lengths are drawn uniformly from {min_kbits..max_kbits} kilobits.
struct TrafficSpec {
  int min_kbits = 100;
  int max_kbits = 500;

  void validate() const;
};

// One packet per device per frame. The transmission window is the half-open
// slot range [arrival, deadline), 0-based; a 1-based arrival a and deadline d
// in the usual notation correspond to arrival = a - 1, deadline = d - 1.
struct PacketTask {
  std::int64_t length_bits = 0;
  int arrival = 0;
  int deadline = 1;

  bool has_packet() const { return length_bits > 0; }
  bool in_window(int slot) const { return slot >= arrival && slot < deadline; }
  bool operator==(const PacketTask&) const = default;
};

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;

  double distance_km() const;
  bool operator==(const Position&) const = default;
};

// A full problem instance. Gains are noise-normalized linear power gains per
// mW of transmit power, so power_mw * gain is the received SNR.
struct Scenario {
  NetworkConfig config;
  RadioParams radio;
  std::vector<Position> positions;
  std::vector<std::vector<PacketTask>> traffic;  // [frame][device]
  std::vector<double> gains;                     // [frame][device][slot]
  std::uint64_t seed = 0;

  int num_devices() const { return config.num_devices; }
  int num_slots() const { return config.num_slots; }
  int num_frames() const { return config.num_frames; }

  double gain(int frame, int device, int slot) const;
  double& gain(int frame, int device, int slot);
  std::span<const double> gain_row(int frame, int device) const;
  const PacketTask& task(int frame, int device) const { return traffic[frame][device]; }
  // SINR a packet needs to be decoded: 2^(L / (W * slot_duration)) - 1.
  double threshold(int frame, int device) const;

  // FNV-1a over every field, including the gains.
  std::uint64_t digest() const;
};

double dbm_to_mw(double level_dbm);
// Energy charged for one frame at the given level (the off level costs 0).
double action_cost(double level_dbm);

double path_loss_db(double dist_km, const RadioParams& radio);
double noise_power_dbm(const RadioParams& radio, double bandwidth_hz);
// Noise-normalized gain for a given fading power draw.
double normalized_gain(double dist_km, double fading, const RadioParams& radio,
                       double bandwidth_hz);

std::mt19937_64 make_stream(std::uint64_t seed, std::string_view purpose,
                            std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t realization);

// Rayleigh-faded gains for one frame, laid out [device][slot].
std::vector<double> draw_channel_gains(const Scenario& scenario, int frame,
                                       std::mt19937_64& rng);

Scenario generate_scenario(const NetworkConfig& config, const RadioParams& radio,
                           const TrafficSpec& traffic, std::uint64_t seed);

// Recomputes every frame's gains from scenario.seed and the stored positions.
void regenerate_gains(Scenario& scenario);

// Independent realizations of one deployment: device positions are fixed by
// the base seed, traffic and fading are redrawn per realization index.
// Realization 0 equals generate_scenario(config, radio, traffic, seed).
class ScenarioStream {
 public:
  ScenarioStream(NetworkConfig config, RadioParams radio, TrafficSpec traffic,
                 std::uint64_t seed);

  Scenario realization(int index) const;
  const NetworkConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

 private:
  NetworkConfig config_;
  RadioParams radio_;
  TrafficSpec traffic_;
  std::uint64_t seed_;
  std::vector<Position> positions_;
};

}  // namespace noma
