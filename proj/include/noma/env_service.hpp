#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noma/config.hpp"
#include "noma/serialization.hpp"
#include "noma/sinr.hpp"

namespace noma {

// One environment episode served to an external agent. Every reset starts
// a fresh realization of the deployment; frames are then played one step
// at a time.
class EnvSession {
 public:
  explicit EnvSession(ExperimentConfig config, std::uint64_t default_seed = 1);

  // A new seed restarts the episode count at 0; repeating the seed (or
  // omitting it) moves on to the next episode of the same deployment.
  void reset(std::optional<std::uint64_t> seed);

  // Plays the current frame. Throws ConstraintViolation for an illegal
  // action and std::invalid_argument for a malformed one; the session is
  // left untouched in both cases. Returns the frame's delivered count.
  int step(const FrameAssignment& actions);

  bool started() const { return scenario_.has_value(); }
  bool done() const { return started() && frame_ >= config_.network.num_frames; }
  int frame() const { return frame_; }  // 0-based frame about to be played
  int episode() const { return episode_; }
  double cumulative_reward() const { return cumulative_; }
  const std::vector<double>& energy() const { return energy_; }
  const std::vector<bool>& served() const { return served_; }
  const Scenario& scenario() const { return *scenario_; }
  const ExperimentConfig& config() const { return config_; }

  // Per-device observation; frame, arrival and deadline are 1-based.
  Json state() const;

 private:
  ExperimentConfig config_;
  std::uint64_t default_seed_;
  std::optional<std::uint64_t> seed_;
  std::optional<Scenario> scenario_;
  int episode_ = 0;
  int frame_ = 0;
  double cumulative_ = 0.0;
  std::vector<double> energy_;
  std::vector<bool> served_;
};

// Reads one device's action list ([{"device", "slot", "power"}, ...]) into
// a frame assignment. Devices that are not listed stay silent; a slot with
// power "off" is no transmission.
FrameAssignment parse_actions(const Json& actions, const NetworkConfig& config);

// Handles one request line and returns the reply line (without newline).
// Sets `closed` on {"cmd":"close"}.
std::string handle_request(EnvSession& session, const std::string& line, bool& closed);

// Serves requests from `in` until close or end of input.
void serve_stream(EnvSession& session, std::istream& in, std::ostream& out);

// Accepts one TCP client at a time on `port` until a client sends close.
// Port 0 picks a free port; `on_listen` receives the bound port.
void serve_tcp(EnvSession& session, int port, const std::string& host = "127.0.0.1",
               const std::function<void(int)>& on_listen = {});

}  // namespace noma
