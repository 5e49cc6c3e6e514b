#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace noma {

// A state of one device's learning problem: remaining energy at the start of
// a frame. Layer l holds the states of frame l + 1; the last layer holds only
// the terminal node.
struct TgNode {
  double energy = 0.0;
  int layer = 0;
};

struct TgEdge {
  int from = 0;
  int to = 0;
  int level = 0;  // index into the power set
  int layer = 0;  // layer of `from`
  double weight = 1.0;
};

// Edge ids, one per layer, from the source to the terminal.
using Path = std::vector<int>;

// Layered DAG over (remaining energy, frame). Frames 1..T each offer every
// power level the remaining energy can pay for; layer T closes every path at
// the terminal with a zero-cost "off" edge. Nodes of a layer with equal
// remaining energy are merged. Node and edge ids are topologically ordered.
class TransitionGraph {
 public:
  // `costs` is the per-frame energy of each power level (off costs 0).
  static TransitionGraph build(double budget, std::span<const double> costs, int frames,
                               int off_level);

  int num_frames() const { return frames_; }
  int num_layers() const { return frames_ + 2; }
  int source() const { return 0; }
  int sink() const { return static_cast<int>(nodes_.size()) - 1; }

  const std::vector<TgNode>& nodes() const { return nodes_; }
  const std::vector<TgEdge>& edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const int> out_edges(int node) const;
  std::span<const int> in_edges(int node) const;
  // Half-open id range [first, second) of the edges leaving `layer`.
  std::pair<int, int> layer_edge_range(int layer) const;
  double cost(int level) const { return costs_[level]; }
  int off_level() const { return off_level_; }

  double weight(int edge) const { return edges_[edge].weight; }
  void set_weight(int edge, double w);
  void reset_weights();

  // Total weight of node -> terminal paths; B(sink) = 1.
  std::vector<double> backward_weights() const;
  // Total weight of source -> node paths; F(source) = 1.
  std::vector<double> forward_weights() const;
  // Divides each layer's edge weights by the layer maximum.
  void renormalize_layers();

  // Number of source-terminal paths (exact up to 2^53).
  double count_paths() const;
  double path_cost(const Path& path) const;

 private:
  int frames_ = 0;
  int off_level_ = 0;
  std::vector<double> costs_;
  std::vector<TgNode> nodes_;
  std::vector<TgEdge> edges_;
  std::vector<int> out_offsets_, out_index_;
  std::vector<int> in_offsets_, in_index_;
  std::vector<int> layer_offsets_;  // edges are stored grouped by layer
};

// Counts quoted for the idealized graph with T frames and P power levels.
struct GraphFormulaCounts {
  std::int64_t nodes = 0;  // 2 + T P
  std::int64_t edges = 0;  // P (P (T - 1) + T + 3) / 2
  std::int64_t paths = 0;  // C(T + P - 1, T)
};

GraphFormulaCounts graph_formula_counts(int frames, int levels);

}  // namespace noma
