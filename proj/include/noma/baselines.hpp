#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "noma/net_model.hpp"
#include "noma/transition_graph.hpp"

namespace noma {

struct TqlParams {
  double alpha = 0.5;
  int episodes = 50;
  // Exploration anneals linearly in the episode index.
  double epsilon_start = 0.2;
  double epsilon_end = 0.01;

  void validate() const;
  double epsilon_at(int episode) const;
};

// Tabular Q-values over the (remaining energy, frame) states of a
// transition graph. There is one entry per frame edge, i.e. per legal
// (state, power) pair; the closing terminal edges carry no decision.
class QTable {
 public:
  explicit QTable(TransitionGraph graph);

  const TransitionGraph& graph() const { return graph_; }
  std::size_t size() const { return values_.size(); }
  bool has_entry(int state, int level) const { return edge_for(state, level) >= 0; }

  // Edge leaving `state` with power level `level`, or -1 if illegal.
  int edge_for(int state, int level) const;
  double value(int state, int level) const;
  void set_value(int state, int level, double v);
  // max over legal actions; 0 once the last frame has been played.
  double best_value(int state) const;
  bool is_terminal(int state) const;

 private:
  TransitionGraph graph_;
  std::vector<double> values_;  // indexed by edge id; frame edges come first
};

// Epsilon-greedy power choice; exact ties go to the lowest power.
int tql_act(const QTable& q, int state, double epsilon, std::mt19937_64& rng);

// Q(s,a) <- Q(s,a) + alpha (r + max_a' Q(s',a') - Q(s,a)), undiscounted.
void tql_update(QTable& q, int state, int level, double reward, int next_state, double alpha);

struct TqlEpisode {
  int delivered = 0;
  std::vector<int> frame_delivered;
  double reward = 0.0;  // sum of the shared per-frame rewards
  std::vector<double> energy_spent;
};

// Episode k runs on stream.realization(k). FM groups each frame and every
// device receives the frame's normalized delivered count as reward.
std::vector<TqlEpisode> tql_train(const ScenarioStream& stream, const TqlParams& params,
                                  std::uint64_t seed);

struct BaselineResult {
  int delivered = 0;
  std::vector<int> frame_delivered;
  std::vector<double> energy_spent;
};

// Every device transmits at the highest power while it can still pay for it;
// FM does the grouping.
BaselineResult max_power_baseline(const Scenario& scenario);

}  // namespace noma
