#include "noma/env_service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace noma {

EnvSession::EnvSession(ExperimentConfig config, std::uint64_t default_seed)
    : config_(std::move(config)), default_seed_(default_seed) {
  config_.validate();
}

void EnvSession::reset(std::optional<std::uint64_t> seed) {
  if (seed && seed != seed_) {
    seed_ = seed;
    episode_ = 0;
  } else if (!seed_) {
    seed_ = default_seed_;
    episode_ = 0;
  } else {
    ++episode_;
  }
  const ScenarioStream stream(config_.network, config_.radio, config_.traffic, *seed_);
  scenario_ = stream.realization(episode_);
  frame_ = 0;
  cumulative_ = 0.0;
  energy_.assign(config_.network.num_devices, config_.network.energy_budget);
  served_.assign(config_.network.num_devices, false);
}

int EnvSession::step(const FrameAssignment& actions) {
  if (!started()) throw std::invalid_argument("no episode in progress; send reset first");
  if (done()) throw std::invalid_argument("episode finished; send reset");
  const auto& cfg = config_.network;
  if (static_cast<int>(actions.size()) != cfg.num_devices) {
    throw std::invalid_argument("expected one action per device");
  }
  std::vector<double> cost(cfg.num_devices, 0.0);
  for (int i = 0; i < cfg.num_devices; ++i) {
    const auto& tx = actions[i];
    if (tx.level < 0 || tx.level >= cfg.num_power_levels()) {
      throw std::invalid_argument("power level index out of range");
    }
    if (!tx.transmits(cfg)) continue;
    cost[i] = action_cost(cfg.power_levels_dbm[tx.level]);
    if (cost[i] > energy_[i] + kEnergyTolerance) {
      throw ConstraintViolation(i, "energy", "needs " + std::to_string(cost[i]) + " but has " +
                                                 std::to_string(energy_[i]) + " left");
    }
  }
  // count_delivered checks windows and slot ranges before anything changes.
  const auto delivery = count_delivered(actions, *scenario_, frame_);
  for (int i = 0; i < cfg.num_devices; ++i) energy_[i] = std::max(0.0, energy_[i] - cost[i]);
  served_ = delivery.success;
  cumulative_ += delivery.count;
  ++frame_;
  return delivery.count;
}

Json EnvSession::state() const {
  Json devices = Json::array();
  if (!started()) return devices;
  const auto& cfg = config_.network;
  const bool finished = done();
  for (int i = 0; i < cfg.num_devices; ++i) {
    Json gains = Json::array();
    int arrival = 0;
    int deadline = 0;
    if (!finished) {
      for (double g : scenario_->gain_row(frame_, i)) gains.push_back(g);
      const auto& task = scenario_->task(frame_, i);
      arrival = task.arrival + 1;
      deadline = task.deadline + 1;
    } else {
      for (int j = 0; j < cfg.num_slots; ++j) gains.push_back(0.0);
    }
    devices.push_back({{"gains", std::move(gains)},
                       {"served", served_},
                       {"energy", energy_[i]},
                       {"arrival", arrival},
                       {"deadline", deadline},
                       {"frame", frame_ + 1},
                       {"episode", episode_}});
  }
  return devices;
}

FrameAssignment parse_actions(const Json& actions, const NetworkConfig& config) {
  if (!actions.is_array()) throw std::invalid_argument("\"actions\" must be an array");
  FrameAssignment frame = idle_frame(config);
  std::set<int> seen;
  for (const auto& a : actions) {
    if (!a.is_object() || !a.contains("device")) {
      throw std::invalid_argument("each action needs a \"device\"");
    }
    const int device = a.at("device").get<int>();
    if (device < 0 || device >= config.num_devices) {
      throw std::invalid_argument("device " + std::to_string(device) + " out of range");
    }
    if (!seen.insert(device).second) {
      throw ConstraintViolation(device, "one-slot", "device listed twice in one step");
    }
    const std::string power = a.value("power", std::string("off"));
    const int level = parse_power_label(power, config);
    const Json slot = a.value("slot", Json(nullptr));
    if (level == config.off_level_index()) continue;
    if (slot.is_null()) {
      throw ConstraintViolation(device, "power-without-slot",
                                "power " + power + " needs a slot");
    }
    const int j = slot.get<int>();
    if (j < 1 || j > config.num_slots) {
      throw ConstraintViolation(device, "slot-range", "slot " + std::to_string(j) + " does not exist");
    }
    frame[device] = Transmission{j - 1, level};
  }
  return frame;
}

namespace {

Json reply_for(const EnvSession& session) {
  return Json{{"ok", true},
              {"state", session.state()},
              {"frame", session.started() ? session.frame() + 1 : 0},
              {"done", session.done()},
              {"cumulative_reward", session.cumulative_reward()}};
}

}  // namespace

std::string handle_request(EnvSession& session, const std::string& line, bool& closed) {
  Json reply;
  try {
    const Json request = Json::parse(line);
    if (!request.is_object() || !request.contains("cmd")) {
      throw std::invalid_argument("request must be an object with \"cmd\"");
    }
    const std::string cmd = request.at("cmd").get<std::string>();
    if (cmd == "reset") {
      std::optional<std::uint64_t> seed;
      if (request.contains("seed") && !request.at("seed").is_null()) {
        seed = request.at("seed").get<std::uint64_t>();
      }
      session.reset(seed);
      reply = reply_for(session);
      reply["reward"] = 0.0;
    } else if (cmd == "step") {
      if (!request.contains("actions")) throw std::invalid_argument("step needs \"actions\"");
      const auto actions = parse_actions(request.at("actions"), session.config().network);
      const int reward = session.step(actions);
      reply = reply_for(session);
      reply["reward"] = static_cast<double>(reward);
    } else if (cmd == "close") {
      closed = true;
      reply = {{"ok", true}, {"done", true}};
    } else {
      throw std::invalid_argument("unknown cmd '" + cmd + "'");
    }
  } catch (const ConstraintViolation& e) {
    reply = {{"ok", false},
             {"error", e.what()},
             {"device", e.device()},
             {"constraint", e.constraint()}};
  } catch (const std::exception& e) {
    reply = {{"ok", false}, {"error", e.what()}};
  }
  return reply.dump();
}

void serve_stream(EnvSession& session, std::istream& in, std::ostream& out) {
  std::string line;
  bool closed = false;
  while (!closed && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_request(session, line, closed) << '\n';
    out.flush();
  }
}

namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

[[noreturn]] void sys_fail(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

void serve_tcp(EnvSession& session, int port, const std::string& host,
               const std::function<void(int)>& on_listen) {
  Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.fd() < 0) sys_fail("socket");
  const int yes = 1;
  ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw std::invalid_argument("bad listen address " + host);
  }
  if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) sys_fail("bind");
  if (::listen(listener.fd(), 1) < 0) sys_fail("listen");
  socklen_t len = sizeof addr;
  ::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  bool closed = false;
  while (!closed) {
    Socket client(::accept(listener.fd(), nullptr, nullptr));
    if (client.fd() < 0) {
      if (errno == EINTR) continue;
      sys_fail("accept");
    }
    std::string pending;
    char buf[4096];
    while (!closed) {
      const ssize_t n = ::recv(client.fd(), buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      pending.append(buf, static_cast<std::size_t>(n));
      std::size_t nl;
      while (!closed && (nl = pending.find('\n')) != std::string::npos) {
        const std::string line = pending.substr(0, nl);
        pending.erase(0, nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!send_all(client.fd(), handle_request(session, line, closed) + "\n")) break;
      }
    }
  }
}

}  // namespace noma
