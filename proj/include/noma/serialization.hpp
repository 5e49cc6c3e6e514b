#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "noma/crl.hpp"
#include "noma/net_model.hpp"
#include "noma/opt.hpp"
#include "noma/sinr.hpp"
#include "noma/transition_graph.hpp"

namespace noma {

using Json = nlohmann::json;

// Slots, arrivals and deadlines are 1-based in every JSON document.

Json to_json(const NetworkConfig& config);
Json to_json(const RadioParams& radio);
NetworkConfig network_config_from_json(const Json& j);
RadioParams radio_params_from_json(const Json& j);

// Fields: config, radio, positions, traffic, seed. Gains are not stored;
// scenario_from_json regenerates them from the seed.
Json to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// "17dbm" style labels; the off level is "off".
std::string power_label(double level_dbm);
// Index into config.power_levels_dbm. Throws std::invalid_argument for a
// label that is not in the power set.
int parse_power_label(const std::string& label, const NetworkConfig& config);

// [frame][device] -> {"slot": j | null, "power": label}
Json to_json(const Assignment& assignment, const NetworkConfig& config);
Assignment assignment_from_json(const Json& j, const NetworkConfig& config);

Json to_json(const OptSolution& solution, const NetworkConfig& config);

// One line of a round trace.
Json to_json(const RoundResult& round, int index, const NetworkConfig& config);

// Node energies, edges and weights of one transition graph.
Json to_json(const TransitionGraph& graph);
// Copies the weights of a snapshot into a graph of the same shape.
void load_weights(TransitionGraph& graph, const Json& snapshot);

}  // namespace noma
