#include "noma/serialization.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace noma {

Json to_json(const NetworkConfig& c) {
  return Json{{"num_devices", c.num_devices},
              {"num_slots", c.num_slots},
              {"num_frames", c.num_frames},
              {"group_cap", c.group_cap},
              {"bandwidth_hz", c.bandwidth_hz},
              {"power_levels_dbm", c.power_levels_dbm},
              {"energy_budget", c.energy_budget},
              {"area_side_m", c.area_side_m},
              {"slot_duration_s", c.slot_duration_s}};
}

Json to_json(const RadioParams& r) {
  return Json{{"carrier_freq_mhz", r.carrier_freq_mhz},
              {"pathloss_intercept_db", r.pathloss_intercept_db},
              {"pathloss_slope_db", r.pathloss_slope_db},
              {"antenna_gain_db", r.antenna_gain_db},
              {"penetration_loss_db", r.penetration_loss_db},
              {"noise_figure_db", r.noise_figure_db},
              {"noise_psd_dbm_hz", r.noise_psd_dbm_hz},
              {"min_distance_km", r.min_distance_km}};
}

NetworkConfig network_config_from_json(const Json& j) {
  NetworkConfig c;
  c.num_devices = j.value("num_devices", c.num_devices);
  c.num_slots = j.value("num_slots", c.num_slots);
  c.num_frames = j.value("num_frames", c.num_frames);
  c.group_cap = j.value("group_cap", c.group_cap);
  c.bandwidth_hz = j.value("bandwidth_hz", c.bandwidth_hz);
  c.power_levels_dbm = j.value("power_levels_dbm", c.power_levels_dbm);
  c.energy_budget = j.value("energy_budget", c.energy_budget);
  c.area_side_m = j.value("area_side_m", c.area_side_m);
  c.slot_duration_s = j.value("slot_duration_s", c.slot_duration_s);
  c.validate();
  return c;
}

RadioParams radio_params_from_json(const Json& j) {
  RadioParams r;
  r.carrier_freq_mhz = j.value("carrier_freq_mhz", r.carrier_freq_mhz);
  r.pathloss_intercept_db = j.value("pathloss_intercept_db", r.pathloss_intercept_db);
  r.pathloss_slope_db = j.value("pathloss_slope_db", r.pathloss_slope_db);
  r.antenna_gain_db = j.value("antenna_gain_db", r.antenna_gain_db);
  r.penetration_loss_db = j.value("penetration_loss_db", r.penetration_loss_db);
  r.noise_figure_db = j.value("noise_figure_db", r.noise_figure_db);
  r.noise_psd_dbm_hz = j.value("noise_psd_dbm_hz", r.noise_psd_dbm_hz);
  r.min_distance_km = j.value("min_distance_km", r.min_distance_km);
  r.validate();
  return r;
}

Json to_json(const Scenario& s) {
  Json positions = Json::array();
  for (const auto& p : s.positions) positions.push_back({p.x_m, p.y_m});
  Json traffic = Json::array();
  for (const auto& frame : s.traffic) {
    Json row = Json::array();
    for (const auto& task : frame) {
      row.push_back({{"length_bits", task.length_bits},
                     {"arrival", task.arrival + 1},
                     {"deadline", task.deadline + 1}});
    }
    traffic.push_back(std::move(row));
  }
  return Json{{"config", to_json(s.config)},
              {"radio", to_json(s.radio)},
              {"positions", std::move(positions)},
              {"traffic", std::move(traffic)},
              {"seed", s.seed}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.config = network_config_from_json(j.at("config"));
  s.radio = radio_params_from_json(j.at("radio"));
  s.seed = j.at("seed").get<std::uint64_t>();
  const auto& cfg = s.config;

  const auto& positions = j.at("positions");
  if (static_cast<int>(positions.size()) != cfg.num_devices) {
    throw std::invalid_argument("scenario: expected one position per device");
  }
  for (const auto& p : positions) s.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});

  const auto& traffic = j.at("traffic");
  if (static_cast<int>(traffic.size()) != cfg.num_frames) {
    throw std::invalid_argument("scenario: expected one traffic row per frame");
  }
  for (const auto& row : traffic) {
    if (static_cast<int>(row.size()) != cfg.num_devices) {
      throw std::invalid_argument("scenario: expected one task per device in every frame");
    }
    std::vector<PacketTask> frame;
    for (const auto& t : row) {
      PacketTask task;
      task.length_bits = t.at("length_bits").get<std::int64_t>();
      task.arrival = t.at("arrival").get<int>() - 1;
      task.deadline = t.at("deadline").get<int>() - 1;
      if (task.length_bits < 0 || task.arrival < 0 || task.arrival >= task.deadline ||
          task.deadline > cfg.num_slots) {
        throw std::invalid_argument("scenario: malformed packet task");
      }
      frame.push_back(task);
    }
    s.traffic.push_back(std::move(frame));
  }
  regenerate_gains(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return scenario_from_json(Json::parse(in));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(scenario).dump(2) << '\n';
}

std::string power_label(double level_dbm) {
  if (level_dbm == kOffLevelDbm) return "off";
  std::ostringstream os;
  os << level_dbm << "dbm";
  return os.str();
}

int parse_power_label(const std::string& label, const NetworkConfig& config) {
  std::string lower;
  for (char ch : label) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "off") return config.off_level_index();
  const auto suffix = lower.rfind("dbm");
  if (suffix == std::string::npos || suffix + 3 != lower.size()) {
    throw std::invalid_argument("power must be \"off\" or a level like \"17dbm\": " + label);
  }
  double value = 0.0;
  const char* first = lower.data();
  const char* last = lower.data() + suffix;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("unreadable power " + label);
  for (int k = 0; k < config.num_power_levels(); ++k) {
    if (std::abs(config.power_levels_dbm[k] - value) < 1e-9) return k;
  }
  throw std::invalid_argument("power " + label + " is not in the power set");
}

Json to_json(const Assignment& assignment, const NetworkConfig& config) {
  Json frames = Json::array();
  for (const auto& frame : assignment) {
    Json row = Json::array();
    for (const auto& tx : frame) {
      row.push_back({{"slot", tx.slot ? Json(*tx.slot + 1) : Json(nullptr)},
                     {"power", power_label(config.power_levels_dbm.at(tx.level))}});
    }
    frames.push_back(std::move(row));
  }
  return frames;
}

Assignment assignment_from_json(const Json& j, const NetworkConfig& config) {
  Assignment out;
  for (const auto& row : j) {
    FrameAssignment frame;
    for (const auto& tx : row) {
      Transmission t;
      if (!tx.at("slot").is_null()) t.slot = tx.at("slot").get<int>() - 1;
      t.level = parse_power_label(tx.at("power").get<std::string>(), config);
      frame.push_back(t);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

Json to_json(const OptSolution& solution, const NetworkConfig& config) {
  Json certificate = Json::array();
  for (const auto& frame : solution.certificate) {
    Json groups = Json::array();
    for (const auto& g : frame) {
      Json members = Json::array();
      for (const auto& m : g.members) {
        members.push_back({{"device", m.device},
                           {"power", power_label(config.power_levels_dbm[m.level])}});
      }
      groups.push_back({{"slot", g.slot + 1}, {"members", std::move(members)}});
    }
    certificate.push_back(std::move(groups));
  }
  return Json{{"objective", solution.objective},
              {"proven_optimal", solution.proven_optimal},
              {"nodes", solution.nodes},
              {"assignment", to_json(solution.assignment, config)},
              {"certificate", std::move(certificate)}};
}

Json to_json(const RoundResult& round, int index, const NetworkConfig& config) {
  Json powers = Json::array();
  for (const auto& device : round.levels) {
    Json row = Json::array();
    for (int level : device) row.push_back(power_label(config.power_levels_dbm[level]));
    powers.push_back(std::move(row));
  }
  Json groups = Json::array();
  for (const auto& frame : round.frames) groups.push_back(frame.groups);
  return Json{{"round", index},
              {"delivered", round.delivered},
              {"rewards", round.rewards},
              {"powers", std::move(powers)},
              {"groups", std::move(groups)},
              {"energy_spent", round.energy_spent}};
}

Json to_json(const TransitionGraph& graph) {
  Json nodes = Json::array();
  for (const auto& n : graph.nodes()) nodes.push_back({{"energy", n.energy}, {"layer", n.layer}});
  Json edges = Json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"level", e.level}, {"weight", e.weight}});
  }
  return Json{{"frames", graph.num_frames()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

void load_weights(TransitionGraph& graph, const Json& snapshot) {
  const auto& edges = snapshot.at("edges");
  if (edges.size() != graph.num_edges() || snapshot.at("nodes").size() != graph.num_nodes()) {
    throw std::invalid_argument("snapshot does not match the graph shape");
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = graph.edges()[k];
    if (edges[k].at("from").get<int>() != e.from || edges[k].at("to").get<int>() != e.to ||
        edges[k].at("level").get<int>() != e.level) {
      throw std::invalid_argument("snapshot edge " + std::to_string(k) + " does not match");
    }
    graph.set_weight(static_cast<int>(k), edges[k].at("weight").get<double>());
  }
}

}  // namespace noma
