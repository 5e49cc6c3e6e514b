#include "noma/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "noma/fm.hpp"

namespace noma {

void TqlParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (episodes < 0) throw std::invalid_argument("episodes must be >= 0");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
      !(epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw std::invalid_argument("exploration rates must lie in [0, 1]");
  }
}

double TqlParams::epsilon_at(int episode) const {
  if (episodes <= 1) return epsilon_start;
  const double frac = static_cast<double>(episode) / static_cast<double>(episodes - 1);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

QTable::QTable(TransitionGraph graph) : graph_(std::move(graph)) {
  // Frame edges occupy ids [0, first terminal-layer edge).
  values_.assign(static_cast<std::size_t>(graph_.layer_edge_range(graph_.num_frames()).first),
                 0.0);
}

int QTable::edge_for(int state, int level) const {
  if (is_terminal(state)) return -1;
  for (int e : graph_.out_edges(state)) {
    if (graph_.edges()[e].level == level) return e;
  }
  return -1;
}

bool QTable::is_terminal(int state) const {
  return graph_.nodes()[state].layer >= graph_.num_frames();
}

double QTable::value(int state, int level) const {
  const int e = edge_for(state, level);
  if (e < 0) throw std::out_of_range("no Q entry for an illegal action");
  return values_[e];
}

void QTable::set_value(int state, int level, double v) {
  const int e = edge_for(state, level);
  if (e < 0) throw std::out_of_range("no Q entry for an illegal action");
  values_[e] = v;
}

double QTable::best_value(int state) const {
  if (is_terminal(state)) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int e : graph_.out_edges(state)) best = std::max(best, values_[e]);
  return best;
}

int tql_act(const QTable& q, int state, double epsilon, std::mt19937_64& rng) {
  if (q.is_terminal(state)) throw std::invalid_argument("no action in a terminal state");
  const auto& g = q.graph();
  const auto out = g.out_edges(state);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    return g.edges()[out[pick(rng)]].level;
  }
  int best_level = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (int e : out) {
    const int level = g.edges()[e].level;
    const double v = q.value(state, level);
    if (v > best || (v == best && level < best_level)) {
      best = v;
      best_level = level;
    }
  }
  return best_level;
}

void tql_update(QTable& q, int state, int level, double reward, int next_state, double alpha) {
  const int e = q.edge_for(state, level);
  if (e < 0) throw std::invalid_argument("illegal (state, action) pair");
  if (q.graph().edges()[e].to != next_state) {
    throw std::invalid_argument("next state does not follow from the action");
  }
  const double old = q.value(state, level);
  q.set_value(state, level, old + alpha * (reward + q.best_value(next_state) - old));
}

std::vector<TqlEpisode> tql_train(const ScenarioStream& stream, const TqlParams& params,
                                  std::uint64_t seed) {
  params.validate();
  const auto& cfg = stream.config();
  auto rng = make_stream(seed, "tql", 0);

  std::vector<double> costs;
  for (double level : cfg.power_levels_dbm) costs.push_back(action_cost(level));
  const QTable prototype(
      TransitionGraph::build(cfg.energy_budget, costs, cfg.num_frames, cfg.off_level_index()));
  std::vector<QTable> tables(cfg.num_devices, prototype);
  const double capacity = static_cast<double>(cfg.frame_capacity());

  std::vector<TqlEpisode> curve;
  curve.reserve(params.episodes);
  for (int k = 0; k < params.episodes; ++k) {
    const Scenario scenario = stream.realization(k);
    const double epsilon = params.epsilon_at(k);
    std::vector<int> state(cfg.num_devices, prototype.graph().source());
    TqlEpisode episode;
    episode.energy_spent.assign(cfg.num_devices, 0.0);
    for (int t = 0; t < cfg.num_frames; ++t) {
      std::vector<int> levels(cfg.num_devices);
      std::vector<double> powers(cfg.num_devices);
      for (int i = 0; i < cfg.num_devices; ++i) {
        levels[i] = tql_act(tables[i], state[i], epsilon, rng);
        powers[i] = dbm_to_mw(cfg.power_levels_dbm[levels[i]]);
        episode.energy_spent[i] += action_cost(cfg.power_levels_dbm[levels[i]]);
      }
      const auto matched = fm_frame(scenario, t, powers);
      const double reward = matched.served_total / capacity;
      episode.delivered += matched.served_total;
      episode.frame_delivered.push_back(matched.served_total);
      episode.reward += reward;
      for (int i = 0; i < cfg.num_devices; ++i) {
        const auto& g = tables[i].graph();
        const int next = g.edges()[tables[i].edge_for(state[i], levels[i])].to;
        tql_update(tables[i], state[i], levels[i], reward, next, params.alpha);
        state[i] = next;
      }
    }
    curve.push_back(std::move(episode));
  }
  return curve;
}

BaselineResult max_power_baseline(const Scenario& scenario) {
  const auto& cfg = scenario.config;
  const double top_level = cfg.power_levels_dbm[cfg.max_level_index()];
  const double cost = action_cost(top_level);
  const double power = dbm_to_mw(top_level);
  BaselineResult result;
  result.energy_spent.assign(cfg.num_devices, 0.0);
  for (int t = 0; t < cfg.num_frames; ++t) {
    std::vector<double> powers(cfg.num_devices, 0.0);
    for (int i = 0; i < cfg.num_devices; ++i) {
      if (result.energy_spent[i] + cost <= cfg.energy_budget + 1e-9) {
        powers[i] = power;
        result.energy_spent[i] += cost;
      }
    }
    const int served = fm_frame(scenario, t, powers).served_total;
    result.delivered += served;
    result.frame_delivered.push_back(served);
  }
  return result;
}

}  // namespace noma
