#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "noma/fm.hpp"
#include "noma/net_model.hpp"
#include "noma/transition_graph.hpp"

namespace noma {

struct CrlParams {
  double gamma = 0.5;   // weight of the uniform covering-path mixture
  double beta = 0.01;   // implicit exploration bias
  double eta = 0.00075; // learning rate
  int rounds = 50;

  void validate() const;
};

// Source-terminal paths that together touch every edge.
struct CoveringPaths {
  std::vector<Path> paths;
  std::vector<int> cover_count;  // [edge] -> number of paths through it
};

CoveringPaths covering_paths(const TransitionGraph& graph);

// B(v): total weight of v -> terminal paths (alias of the graph method,
// named after its role in the learner).
std::vector<double> backward_path_weights(const TransitionGraph& graph);

// With probability gamma a uniform member of the covering set, otherwise a
// walk that picks edge (v, u) with probability w(e) B(u) / B(v).
Path sample_path(const TransitionGraph& graph, const CoveringPaths& cover,
                 std::span<const double> backward, double gamma, std::mt19937_64& rng);

// Marginal probability that the sampling rule above traverses each edge.
std::vector<double> edge_probabilities(const TransitionGraph& graph, const CoveringPaths& cover,
                                       double gamma);

// Importance-weighted exponential update of every edge:
//   w(e) <- w(e) exp(eta (beta + r_e 1{e in path}) / q(e))
// where r_e is layer_rewards[layer of e] (terminal-layer edges earn 0).
// Layer weights are renormalized afterwards.
void update_weights(TransitionGraph& graph, const Path& path,
                    std::span<const double> layer_rewards, std::span<const double> q,
                    double beta, double eta);

// One device's learner.
class CrlAgent {
 public:
  CrlAgent(double budget, std::span<const double> costs, int frames, int off_level);

  const TransitionGraph& graph() const { return graph_; }
  TransitionGraph& graph() { return graph_; }
  const CoveringPaths& cover() const { return cover_; }
  const std::vector<double>& probabilities() const { return q_; }

  Path sample(double gamma, std::mt19937_64& rng);
  // q for the current weights; must precede update().
  void refresh(double gamma);
  void update(const Path& path, std::span<const double> frame_rewards, double beta, double eta);

  // Power level index chosen on each frame edge of the path.
  std::vector<int> levels(const Path& path) const;

 private:
  TransitionGraph graph_;
  CoveringPaths cover_;
  std::vector<double> q_;
};

std::vector<CrlAgent> make_agents(const NetworkConfig& config);

struct RoundResult {
  std::vector<std::vector<int>> levels;  // [device][frame] power level index
  std::vector<FrameMatchResult> frames;
  std::vector<double> rewards;  // [frame], normalized to [0, 1]
  int delivered = 0;
  std::vector<double> energy_spent;  // [device], cost of the sampled path
};

// One CRL round on one realization: sample, evaluate every frame with FM,
// refresh edge probabilities, update weights.
RoundResult crl_round(const Scenario& scenario, std::vector<CrlAgent>& agents,
                      const CrlParams& params, std::mt19937_64& rng);

// Per-frame transmit powers in mW implied by each device's level choices.
std::vector<double> frame_powers(const NetworkConfig& config,
                                 const std::vector<std::vector<int>>& levels, int frame);

using RoundObserver = std::function<void(int round, const RoundResult&)>;

// params.rounds rounds; round k runs on stream.realization(k).
std::vector<RoundResult> run_crl(const ScenarioStream& stream, const CrlParams& params,
                                 std::uint64_t seed, const RoundObserver& observer = {});

}  // namespace noma
