#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "noma/baselines.hpp"
#include "noma/crl.hpp"
#include "noma/net_model.hpp"
#include "noma/opt.hpp"

namespace noma {

// Everything a run needs besides the seed.
struct ExperimentConfig {
  NetworkConfig network;
  RadioParams radio;
  TrafficSpec traffic;
  CrlParams crl;
  TqlParams tql;
  OptOptions opt;
  // Learning algorithms are scored on the mean of their last rounds/episodes.
  int eval_window = 10;

  void validate() const;
};

// The flat subset of TOML the config files use: [section] headers,
// key = value lines with integers, floats, booleans, "strings" and
// single-line arrays of numbers, and # comments.
using TomlValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

TomlTable parse_toml(const std::string& text);

// Sections: [network] [radio] [traffic] [crl] [tql] [opt] [harness].
// Missing keys keep their defaults; unknown sections or keys are errors.
ExperimentConfig config_from_toml(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace noma
