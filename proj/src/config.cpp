#include "noma/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace noma {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment, leaving '#' inside quotes alone.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + what);
}

double parse_number(const std::string& text, int line_no) {
  std::string s;
  for (char ch : text) {
    if (ch != '_') s += ch;
  }
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line_no, "not a number: " + text);
  }
  return v;
}

TomlValue parse_value(const std::string& text, int line_no) {
  if (text.empty()) fail(line_no, "missing value");
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') fail(line_no, "unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text.front() == '[') {
    if (text.back() != ']') fail(line_no, "arrays must close on the same line");
    std::vector<double> values;
    std::stringstream body(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
      item = trim(item);
      if (!item.empty()) values.push_back(parse_number(item, line_no));
    }
    return values;
  }
  const bool integral = text.find_first_of(".eE") == std::string::npos ||
                        text.rfind("0x", 0) == 0;
  if (integral) {
    std::string s;
    for (char ch : text) {
      if (ch != '_') s += ch;
    }
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  return parse_number(text, line_no);
}

double as_double(const TomlValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::invalid_argument(key + " must be a number");
}

int as_int(const TomlValue& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<int>(*i);
  throw std::invalid_argument(key + " must be an integer");
}

std::vector<double> as_list(const TomlValue& v, const std::string& key) {
  if (const auto* l = std::get_if<std::vector<double>>(&v)) return *l;
  throw std::invalid_argument(key + " must be an array of numbers");
}

}  // namespace

void ExperimentConfig::validate() const {
  network.validate();
  radio.validate();
  traffic.validate();
  crl.validate();
  tql.validate();
  if (eval_window < 1) throw std::invalid_argument("eval_window must be >= 1");
  if (!(opt.time_limit_s > 0.0)) throw std::invalid_argument("opt time limit must be positive");
}

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    auto& entries = table[section];
    if (entries.contains(key)) fail(line_no, "duplicate key " + key);
    entries.emplace(key, parse_value(trim(line.substr(eq + 1)), line_no));
  }
  return table;
}

ExperimentConfig config_from_toml(const std::string& text) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const TomlValue&, const std::string&)>;
  auto num = [](double& field) { return Setter([&field](auto& v, auto& k) { field = as_double(v, k); }); };
  auto integer = [](int& field) { return Setter([&field](auto& v, auto& k) { field = as_int(v, k); }); };

  const std::map<std::string, std::map<std::string, Setter>> known{
      {"network",
       {{"num_devices", integer(cfg.network.num_devices)},
        {"num_slots", integer(cfg.network.num_slots)},
        {"num_frames", integer(cfg.network.num_frames)},
        {"group_cap", integer(cfg.network.group_cap)},
        {"bandwidth_hz", num(cfg.network.bandwidth_hz)},
        {"power_levels_dbm",
         [&](auto& v, auto& k) { cfg.network.power_levels_dbm = as_list(v, k); }},
        {"energy_budget", num(cfg.network.energy_budget)},
        {"area_side_m", num(cfg.network.area_side_m)},
        {"slot_duration_s", num(cfg.network.slot_duration_s)}}},
      {"radio",
       {{"carrier_freq_mhz", num(cfg.radio.carrier_freq_mhz)},
        {"pathloss_intercept_db", num(cfg.radio.pathloss_intercept_db)},
        {"pathloss_slope_db", num(cfg.radio.pathloss_slope_db)},
        {"antenna_gain_db", num(cfg.radio.antenna_gain_db)},
        {"penetration_loss_db", num(cfg.radio.penetration_loss_db)},
        {"noise_figure_db", num(cfg.radio.noise_figure_db)},
        {"noise_psd_dbm_hz", num(cfg.radio.noise_psd_dbm_hz)},
        {"min_distance_km", num(cfg.radio.min_distance_km)}}},
      {"traffic",
       {{"min_kbits", integer(cfg.traffic.min_kbits)},
        {"max_kbits", integer(cfg.traffic.max_kbits)}}},
      {"crl",
       {{"gamma", num(cfg.crl.gamma)},
        {"beta", num(cfg.crl.beta)},
        {"eta", num(cfg.crl.eta)},
        {"rounds", integer(cfg.crl.rounds)}}},
      {"tql",
       {{"alpha", num(cfg.tql.alpha)},
        {"episodes", integer(cfg.tql.episodes)},
        {"epsilon_start", num(cfg.tql.epsilon_start)},
        {"epsilon_end", num(cfg.tql.epsilon_end)}}},
      {"opt",
       {{"time_limit_s", num(cfg.opt.time_limit_s)},
        {"config_cap",
         [&](auto& v, auto& k) {
           const int cap = as_int(v, k);
           if (cap < 1) throw std::invalid_argument("config_cap must be positive");
           cfg.opt.config_cap = static_cast<std::size_t>(cap);
         }}}},
      {"harness", {{"eval_window", integer(cfg.eval_window)}}},
  };

  for (const auto& [section, entries] : parse_toml(text)) {
    const auto sec = known.find(section);
    if (sec == known.end()) {
      throw std::invalid_argument("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : entries) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        throw std::invalid_argument("unknown key " + key + " in [" + section + "]");
      }
      setter->second(value, section + "." + key);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_toml(buffer.str());
}

}  // namespace noma
