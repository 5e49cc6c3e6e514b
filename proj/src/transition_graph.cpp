#include "noma/transition_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace noma {

namespace {

constexpr double kCostTolerance = 1e-9;

// Energies are merged at micro-mW resolution so that partial sums taken in
// different orders land on the same node.
std::int64_t energy_key(double e) { return std::llround(e * 1e6); }

void build_csr(std::size_t num_nodes, const std::vector<TgEdge>& edges, bool outgoing,
               std::vector<int>& offsets, std::vector<int>& index) {
  offsets.assign(num_nodes + 1, 0);
  for (const auto& e : edges) ++offsets[(outgoing ? e.from : e.to) + 1];
  for (std::size_t v = 0; v < num_nodes; ++v) offsets[v + 1] += offsets[v];
  index.assign(edges.size(), 0);
  auto cursor = offsets;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int v = outgoing ? edges[k].from : edges[k].to;
    index[cursor[v]++] = static_cast<int>(k);
  }
}

}  // namespace

TransitionGraph TransitionGraph::build(double budget, std::span<const double> costs, int frames,
                                       int off_level) {
  if (!(budget >= 0.0)) throw std::invalid_argument("energy budget must be >= 0");
  if (frames < 1) throw std::invalid_argument("at least one frame is required");
  if (costs.empty()) throw std::invalid_argument("power set is empty");
  if (off_level < 0 || off_level >= static_cast<int>(costs.size()) || costs[off_level] != 0.0) {
    throw std::invalid_argument("off level must exist and cost nothing");
  }

  TransitionGraph g;
  g.frames_ = frames;
  g.off_level_ = off_level;
  g.costs_.assign(costs.begin(), costs.end());
  g.nodes_.push_back({budget, 0});
  g.layer_offsets_.push_back(0);

  std::size_t layer_begin = 0;
  for (int layer = 0; layer < frames; ++layer) {
    const std::size_t layer_end = g.nodes_.size();
    std::map<std::int64_t, int> next;
    for (std::size_t v = layer_begin; v < layer_end; ++v) {
      const double e = g.nodes_[v].energy;
      for (int k = 0; k < static_cast<int>(costs.size()); ++k) {
        if (costs[k] > e + kCostTolerance) continue;
        const double remaining = std::max(0.0, e - costs[k]);
        auto [it, inserted] =
            next.try_emplace(energy_key(remaining), static_cast<int>(g.nodes_.size()));
        if (inserted) g.nodes_.push_back({remaining, layer + 1});
        g.edges_.push_back({static_cast<int>(v), it->second, k, layer, 1.0});
      }
    }
    g.layer_offsets_.push_back(static_cast<int>(g.edges_.size()));
    layer_begin = layer_end;
  }

  const int sink = static_cast<int>(g.nodes_.size());
  for (std::size_t v = layer_begin; v < static_cast<std::size_t>(sink); ++v) {
    g.edges_.push_back({static_cast<int>(v), sink, off_level, frames, 1.0});
  }
  g.nodes_.push_back({0.0, frames + 1});
  g.layer_offsets_.push_back(static_cast<int>(g.edges_.size()));

  build_csr(g.nodes_.size(), g.edges_, true, g.out_offsets_, g.out_index_);
  build_csr(g.nodes_.size(), g.edges_, false, g.in_offsets_, g.in_index_);
  return g;
}

std::span<const int> TransitionGraph::out_edges(int node) const {
  return {out_index_.data() + out_offsets_[node],
          static_cast<std::size_t>(out_offsets_[node + 1] - out_offsets_[node])};
}

std::span<const int> TransitionGraph::in_edges(int node) const {
  return {in_index_.data() + in_offsets_[node],
          static_cast<std::size_t>(in_offsets_[node + 1] - in_offsets_[node])};
}

std::pair<int, int> TransitionGraph::layer_edge_range(int layer) const {
  if (layer < 0 || layer > frames_) throw std::out_of_range("edge layer out of range");
  return {layer_offsets_[layer], layer_offsets_[layer + 1]};
}

void TransitionGraph::set_weight(int edge, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("edge weights must be positive and finite");
  }
  edges_[edge].weight = w;
}

void TransitionGraph::reset_weights() {
  for (auto& e : edges_) e.weight = 1.0;
}

std::vector<double> TransitionGraph::backward_weights() const {
  std::vector<double> b(nodes_.size(), 0.0);
  b[sink()] = 1.0;
  for (int v = sink() - 1; v >= 0; --v) {
    double sum = 0.0;
    for (int e : out_edges(v)) sum += edges_[e].weight * b[edges_[e].to];
    b[v] = sum;
  }
  return b;
}

std::vector<double> TransitionGraph::forward_weights() const {
  std::vector<double> f(nodes_.size(), 0.0);
  f[source()] = 1.0;
  for (int v = 1; v <= sink(); ++v) {
    double sum = 0.0;
    for (int e : in_edges(v)) sum += edges_[e].weight * f[edges_[e].from];
    f[v] = sum;
  }
  return f;
}

void TransitionGraph::renormalize_layers() {
  for (int layer = 0; layer <= frames_; ++layer) {
    double top = 0.0;
    for (int e = layer_offsets_[layer]; e < layer_offsets_[layer + 1]; ++e) {
      top = std::max(top, edges_[e].weight);
    }
    if (!(top > 0.0)) continue;
    for (int e = layer_offsets_[layer]; e < layer_offsets_[layer + 1]; ++e) {
      edges_[e].weight /= top;
    }
  }
}

double TransitionGraph::count_paths() const {
  std::vector<double> n(nodes_.size(), 0.0);
  n[sink()] = 1.0;
  for (int v = sink() - 1; v >= 0; --v) {
    for (int e : out_edges(v)) n[v] += n[edges_[e].to];
  }
  return n[source()];
}

double TransitionGraph::path_cost(const Path& path) const {
  double total = 0.0;
  for (int e : path) total += costs_[edges_[e].level];
  return total;
}

GraphFormulaCounts graph_formula_counts(int frames, int levels) {
  GraphFormulaCounts c;
  const std::int64_t t = frames;
  const std::int64_t p = levels;
  c.nodes = 2 + t * p;
  c.edges = p * (p * (t - 1) + t + 3) / 2;
  // C(T + P - 1, T) computed incrementally; each partial product is exact.
  std::int64_t binom = 1;
  for (std::int64_t k = 1; k <= t; ++k) binom = binom * (p - 1 + k) / k;
  c.paths = binom;
  return c;
}

}  // namespace noma
