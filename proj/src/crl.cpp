#include "noma/crl.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace noma {

void CrlParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
}

CoveringPaths covering_paths(const TransitionGraph& graph) {
  const int n = static_cast<int>(graph.num_nodes());
  const auto& edges = graph.edges();

  // Breadth-first passes from the source and back from the terminal. In a
  // layered DAG every source-v path has the same hop count, so the first
  // edge found is a shortest one.
  std::vector<int> parent(n, -1);
  std::vector<bool> seen(n, false);
  std::vector<int> frontier{graph.source()};
  seen[graph.source()] = true;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int v : frontier) {
      for (int e : graph.out_edges(v)) {
        const int u = edges[e].to;
        if (!seen[u]) {
          seen[u] = true;
          parent[u] = e;
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }

  std::vector<int> child(n, -1);
  std::fill(seen.begin(), seen.end(), false);
  frontier = {graph.sink()};
  seen[graph.sink()] = true;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int v : frontier) {
      for (int e : graph.in_edges(v)) {
        const int u = edges[e].from;
        if (!seen[u]) {
          seen[u] = true;
          child[u] = e;
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }

  CoveringPaths cover;
  cover.cover_count.assign(edges.size(), 0);
  std::set<Path> unique;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if ((e.from != graph.source() && parent[e.from] < 0) ||
        (e.to != graph.sink() && child[e.to] < 0)) {
      throw std::logic_error("transition graph has an edge off every source-terminal path");
    }
    Path path;
    for (int v = e.from; v != graph.source(); v = edges[parent[v]].from) {
      path.push_back(parent[v]);
    }
    std::reverse(path.begin(), path.end());
    path.push_back(static_cast<int>(k));
    for (int v = e.to; v != graph.sink(); v = edges[child[v]].to) path.push_back(child[v]);
    if (unique.insert(path).second) cover.paths.push_back(std::move(path));
  }
  for (const auto& path : cover.paths) {
    for (int e : path) ++cover.cover_count[e];
  }
  return cover;
}

std::vector<double> backward_path_weights(const TransitionGraph& graph) {
  return graph.backward_weights();
}

Path sample_path(const TransitionGraph& graph, const CoveringPaths& cover,
                 std::span<const double> backward, double gamma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < gamma) {
    std::uniform_int_distribution<std::size_t> pick(0, cover.paths.size() - 1);
    return cover.paths[pick(rng)];
  }
  const auto& edges = graph.edges();
  Path path;
  path.reserve(graph.num_frames() + 1);
  int v = graph.source();
  while (v != graph.sink()) {
    const auto out = graph.out_edges(v);
    const double target = unit(rng) * backward[v];
    double acc = 0.0;
    int chosen = out.back();
    for (int e : out) {
      acc += edges[e].weight * backward[edges[e].to];
      if (target < acc) {
        chosen = e;
        break;
      }
    }
    path.push_back(chosen);
    v = edges[chosen].to;
  }
  return path;
}

std::vector<double> edge_probabilities(const TransitionGraph& graph, const CoveringPaths& cover,
                                       double gamma) {
  if (cover.paths.empty()) throw std::invalid_argument("covering path set is empty");
  const auto back = graph.backward_weights();
  const auto fwd = graph.forward_weights();
  const double total = back[graph.source()];
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::logic_error("path weights are degenerate");
  }
  const auto& edges = graph.edges();
  const double uniform = gamma / static_cast<double>(cover.paths.size());
  std::vector<double> q(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    q[k] = (1.0 - gamma) * fwd[e.from] * e.weight * back[e.to] / total +
           uniform * cover.cover_count[k];
  }
  return q;
}

void update_weights(TransitionGraph& graph, const Path& path,
                    std::span<const double> layer_rewards, std::span<const double> q,
                    double beta, double eta) {
  const auto& edges = graph.edges();
  if (q.size() != edges.size()) throw std::invalid_argument("one probability per edge required");
  if (static_cast<int>(layer_rewards.size()) != graph.num_frames()) {
    throw std::invalid_argument("one reward per frame required");
  }
  std::vector<bool> on_path(edges.size(), false);
  for (int e : path) on_path[e] = true;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(q[k] > 0.0)) {
      throw std::logic_error("edge " + std::to_string(k) + " has zero selection probability");
    }
    const int layer = edges[k].layer;
    const double r = (on_path[k] && layer < graph.num_frames()) ? layer_rewards[layer] : 0.0;
    const double estimate = (beta + r) / q[k];
    graph.set_weight(static_cast<int>(k), edges[k].weight * std::exp(eta * estimate));
  }
  graph.renormalize_layers();
}

CrlAgent::CrlAgent(double budget, std::span<const double> costs, int frames, int off_level)
    : graph_(TransitionGraph::build(budget, costs, frames, off_level)),
      cover_(covering_paths(graph_)) {}

Path CrlAgent::sample(double gamma, std::mt19937_64& rng) {
  const auto back = graph_.backward_weights();
  return sample_path(graph_, cover_, back, gamma, rng);
}

void CrlAgent::refresh(double gamma) { q_ = edge_probabilities(graph_, cover_, gamma); }

void CrlAgent::update(const Path& path, std::span<const double> frame_rewards, double beta,
                      double eta) {
  if (q_.size() != graph_.num_edges()) throw std::logic_error("refresh() must precede update()");
  update_weights(graph_, path, frame_rewards, q_, beta, eta);
}

std::vector<int> CrlAgent::levels(const Path& path) const {
  std::vector<int> out;
  out.reserve(graph_.num_frames());
  for (int t = 0; t < graph_.num_frames(); ++t) out.push_back(graph_.edges()[path[t]].level);
  return out;
}

std::vector<CrlAgent> make_agents(const NetworkConfig& config) {
  std::vector<double> costs;
  for (double level : config.power_levels_dbm) costs.push_back(action_cost(level));
  std::vector<CrlAgent> agents;
  agents.reserve(config.num_devices);
  // Every device starts from the same graph; copy instead of rebuilding.
  CrlAgent prototype(config.energy_budget, costs, config.num_frames, config.off_level_index());
  for (int i = 0; i < config.num_devices; ++i) agents.push_back(prototype);
  return agents;
}

std::vector<double> frame_powers(const NetworkConfig& config,
                                 const std::vector<std::vector<int>>& levels, int frame) {
  std::vector<double> powers(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    powers[i] = dbm_to_mw(config.power_levels_dbm[levels[i][frame]]);
  }
  return powers;
}

RoundResult crl_round(const Scenario& scenario, std::vector<CrlAgent>& agents,
                      const CrlParams& params, std::mt19937_64& rng) {
  const auto& cfg = scenario.config;
  if (static_cast<int>(agents.size()) != cfg.num_devices) {
    throw std::invalid_argument("one agent per device is required");
  }
  RoundResult result;
  std::vector<Path> paths;
  paths.reserve(agents.size());
  for (auto& agent : agents) {
    paths.push_back(agent.sample(params.gamma, rng));
    result.levels.push_back(agent.levels(paths.back()));
    result.energy_spent.push_back(agent.graph().path_cost(paths.back()));
  }

  const double capacity = static_cast<double>(cfg.frame_capacity());
  for (int t = 0; t < cfg.num_frames; ++t) {
    const auto powers = frame_powers(cfg, result.levels, t);
    auto matched = fm_frame(scenario, t, powers);
    result.delivered += matched.served_total;
    result.rewards.push_back(matched.served_total / capacity);
    result.frames.push_back(std::move(matched));
  }

  for (std::size_t i = 0; i < agents.size(); ++i) {
    agents[i].refresh(params.gamma);
    agents[i].update(paths[i], result.rewards, params.beta, params.eta);
  }
  return result;
}

std::vector<RoundResult> run_crl(const ScenarioStream& stream, const CrlParams& params,
                                 std::uint64_t seed, const RoundObserver& observer) {
  params.validate();
  auto rng = make_stream(seed, "crl", 0);
  auto agents = make_agents(stream.config());
  std::vector<RoundResult> rounds;
  rounds.reserve(params.rounds);
  for (int k = 0; k < params.rounds; ++k) {
    const Scenario scenario = stream.realization(k);
    rounds.push_back(crl_round(scenario, agents, params, rng));
    if (observer) observer(k, rounds.back());
  }
  return rounds;
}

}  // namespace noma
