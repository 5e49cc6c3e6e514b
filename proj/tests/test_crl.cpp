#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "fixtures.hpp"
#include "noma/crl.hpp"
#include "noma/transition_graph.hpp"
#include "oracles.hpp"

using namespace noma;

namespace {

std::vector<double> reference_costs() {
  std::vector<double> c;
  for (double level : NetworkConfig{}.power_levels_dbm) c.push_back(action_cost(level));
  return c;
}

TransitionGraph reference_graph() { return TransitionGraph::build(500.0, reference_costs(), 5, 0); }

// Small graphs with at most 200 paths and a mix of shapes.
std::vector<TransitionGraph> small_graphs() {
  std::vector<TransitionGraph> out;
  const auto c = reference_costs();
  for (double budget : {0.0, 60.0, 120.0, 250.0, 420.0}) {
    for (int frames : {1, 2, 3, 4}) {
      auto g = TransitionGraph::build(budget, c, frames, 0);
      if (g.count_paths() <= 200) out.push_back(std::move(g));
    }
  }
  return out;
}

void randomize(TransitionGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  for (std::size_t e = 0; e < g.num_edges(); ++e) g.set_weight(static_cast<int>(e), w(rng));
}

double path_weight(const TransitionGraph& g, const Path& p) {
  double w = 1.0;
  for (int e : p) w *= g.weight(e);
  return w;
}

}  // namespace

TEST(TransitionGraph, FormulaCounts) {
  const auto f = graph_formula_counts(5, 4);
  EXPECT_EQ(f.nodes, 22);
  EXPECT_EQ(f.edges, 48);
  EXPECT_EQ(f.paths, 56);
}

TEST(TransitionGraph, SingleFrameHasOnePathPerLevel) {
  const auto g = TransitionGraph::build(500.0, reference_costs(), 1, 0);
  EXPECT_EQ(oracle::all_paths(g).size(), 4u);
  EXPECT_EQ(g.count_paths(), 4.0);
}

TEST(TransitionGraph, GenericCostsGiveProductPaths) {
  const double costs[] = {0.0, 1.2345};
  const auto g = TransitionGraph::build(100.0, costs, 2, 0);
  EXPECT_EQ(oracle::all_paths(g).size(), 4u);
}

TEST(TransitionGraph, StructureInvariants) {
  for (const auto& g : small_graphs()) {
    for (const auto& e : g.edges()) {
      EXPECT_EQ(g.nodes()[e.to].layer, g.nodes()[e.from].layer + 1);
      EXPECT_EQ(e.layer, g.nodes()[e.from].layer);
      EXPECT_GT(e.weight, 0.0);
      EXPECT_NEAR(g.nodes()[e.to].energy,
                  e.layer < g.num_frames() ? g.nodes()[e.from].energy - g.cost(e.level) : 0.0,
                  1e-6);
    }
    for (const auto& p : oracle::all_paths(g)) {
      EXPECT_EQ(static_cast<int>(p.size()), g.num_frames() + 1);
      EXPECT_LE(g.path_cost(p), g.nodes()[g.source()].energy + 1e-9);
    }
  }
  EXPECT_THROW(TransitionGraph::build(-1.0, reference_costs(), 5, 0), std::invalid_argument);
}

TEST(TransitionGraph, ReferenceScaleCountsAgreeWithEnumeration) {
  const auto g = reference_graph();
  EXPECT_EQ(static_cast<double>(oracle::all_paths(g).size()), g.count_paths());
}

TEST(TransitionGraph, BackwardWeightsCountAndMultiply) {
  auto g = reference_graph();
  EXPECT_EQ(g.backward_weights()[g.source()], g.count_paths());
  const double costs[] = {0.0, 50.0};
  auto line = TransitionGraph::build(0.0, costs, 2, 0);
  ASSERT_EQ(line.num_edges(), 3u);
  line.set_weight(0, 2.0);
  line.set_weight(1, 3.0);
  EXPECT_DOUBLE_EQ(backward_path_weights(line)[line.source()], 6.0);
}

TEST(ProbabilityFlow, DynamicProgramsMatchEnumeration) {
  std::mt19937_64 rng(5);
  for (auto g : small_graphs()) {
    randomize(g, rng);
    const auto paths = oracle::all_paths(g);
    double total = 0.0;
    std::vector<double> through(g.num_edges(), 0.0);
    for (const auto& p : paths) {
      const double w = path_weight(g, p);
      total += w;
      for (int e : p) through[e] += w;
    }
    const auto b = g.backward_weights();
    const auto f = g.forward_weights();
    EXPECT_NEAR(b[g.source()], total, 1e-9 * total);
    EXPECT_NEAR(f[g.sink()], total, 1e-9 * total);
    // Pure weight-walk marginals against enumerated path mass.
    const auto cover = covering_paths(g);
    const auto q = edge_probabilities(g, cover, 0.0);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      EXPECT_NEAR(q[e], through[e] / total, 1e-9 * std::max(1.0, q[e]));
    }
  }
}

TEST(ProbabilityFlow, CoveringPathsCoverEveryEdge) {
  for (const auto& g : small_graphs()) {
    const auto cover = covering_paths(g);
    EXPECT_LE(cover.paths.size(), g.num_edges());
    std::vector<int> hits(g.num_edges(), 0);
    for (const auto& p : cover.paths) {
      EXPECT_EQ(static_cast<int>(p.size()), g.num_frames() + 1);
      EXPECT_EQ(g.edges()[p.front()].from, g.source());
      EXPECT_EQ(g.edges()[p.back()].to, g.sink());
      for (std::size_t k = 1; k < p.size(); ++k) EXPECT_EQ(g.edges()[p[k - 1]].to, g.edges()[p[k]].from);
      for (int e : p) ++hits[e];
    }
    EXPECT_EQ(hits, cover.cover_count);
    for (int h : hits) EXPECT_GT(h, 0);
  }
  const double costs[] = {0.0, 50.0};
  const auto line = TransitionGraph::build(0.0, costs, 3, 0);
  EXPECT_EQ(covering_paths(line).paths.size(), 1u);
}

TEST(ProbabilityFlow, LayerCutsAndExplorationFloor) {
  std::mt19937_64 rng(6);
  auto graphs = small_graphs();
  graphs.push_back(reference_graph());
  for (auto g : graphs) {
    randomize(g, rng);
    const auto cover = covering_paths(g);
    for (double gamma : {0.1, 0.5, 1.0}) {
      const auto q = edge_probabilities(g, cover, gamma);
      for (int layer = 0; layer <= g.num_frames(); ++layer) {
        const auto [lo, hi] = g.layer_edge_range(layer);
        double sum = 0.0;
        for (int e = lo; e < hi; ++e) sum += q[e];
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
      for (double x : q) EXPECT_GE(x, gamma / cover.paths.size() - 1e-15);
    }
  }
  const double costs[] = {0.0, 50.0};
  const auto line = TransitionGraph::build(0.0, costs, 2, 0);
  for (double x : edge_probabilities(line, covering_paths(line), 0.5)) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Sampling, WeightRatioTwoPaths) {
  const double costs[] = {0.0, 50.0};
  auto g = TransitionGraph::build(50.0, costs, 1, 0);
  // Layer 0 has an off edge and a transmit edge; each closes with one edge.
  const auto [lo, hi] = g.layer_edge_range(0);
  ASSERT_EQ(hi - lo, 2);
  g.set_weight(lo, 1.0);
  g.set_weight(lo + 1, 3.0);
  const auto cover = covering_paths(g);
  const auto back = g.backward_weights();
  std::mt19937_64 rng(7);
  const int n = 10000;
  int second = 0;
  for (int k = 0; k < n; ++k) second += sample_path(g, cover, back, 0.0, rng)[0] == lo + 1;
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  EXPECT_NEAR(static_cast<double>(second) / n, 0.75, 3 * sigma);
}

TEST(Sampling, EqualWeightsAreUniformOverPaths) {
  const auto g = TransitionGraph::build(250.0, reference_costs(), 2, 0);
  const auto paths = oracle::all_paths(g);
  const auto cover = covering_paths(g);
  const auto back = g.backward_weights();
  std::map<Path, int> counts;
  std::mt19937_64 rng(8);
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++counts[sample_path(g, cover, back, 0.0, rng)];
  EXPECT_EQ(counts.size(), paths.size());
  double chi2 = 0.0;
  const double expect = static_cast<double>(n) / paths.size();
  for (const auto& p : paths) chi2 += std::pow(counts[p] - expect, 2) / expect;
  const boost::math::chi_squared dist(static_cast<double>(paths.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 0.01)));
}

TEST(Sampling, GammaOneIsUniformOverCover) {
  auto g = reference_graph();
  std::mt19937_64 rng(9);
  randomize(g, rng);
  const auto cover = covering_paths(g);
  const auto back = g.backward_weights();
  std::map<Path, int> counts;
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++counts[sample_path(g, cover, back, 1.0, rng)];
  double chi2 = 0.0;
  const double expect = static_cast<double>(n) / cover.paths.size();
  for (const auto& p : cover.paths) chi2 += std::pow(counts[p] - expect, 2) / expect;
  EXPECT_EQ(counts.size(), cover.paths.size());
  const boost::math::chi_squared dist(static_cast<double>(cover.paths.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 0.01)));
}

TEST(Sampling, EdgeFrequenciesMatchProbabilities) {
  auto g = TransitionGraph::build(250.0, reference_costs(), 3, 0);
  std::mt19937_64 rng(10);
  randomize(g, rng);
  const auto cover = covering_paths(g);
  const auto back = g.backward_weights();
  const auto q = edge_probabilities(g, cover, 0.5);
  const int n = 10000;
  std::vector<int> hits(g.num_edges(), 0);
  for (int k = 0; k < n; ++k) {
    for (int e : sample_path(g, cover, back, 0.5, rng)) ++hits[e];
  }
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const double sigma = std::sqrt(q[e] * (1 - q[e]) / n);
    EXPECT_NEAR(static_cast<double>(hits[e]) / n, q[e], 3 * sigma + 1e-12) << "edge " << e;
  }
}

TEST(Update, Arithmetic) {
  const double costs[] = {0.0, 50.0};
  auto g = TransitionGraph::build(50.0, costs, 1, 0);
  const auto [lo, hi] = g.layer_edge_range(0);
  (void)hi;
  std::vector<double> q(g.num_edges(), 0.5);
  const double reward[] = {0.4};
  // Path through the transmit edge.
  const Path path{lo + 1, static_cast<int>(g.num_edges()) - 1};
  auto h = g;
  update_weights(h, path, reward, q, 0.01, 0.0);
  for (std::size_t e = 0; e < g.num_edges(); ++e) EXPECT_EQ(h.weight(static_cast<int>(e)), 1.0);
  update_weights(g, path, reward, q, 0.01, 0.00075);
  // On-path multiplier exp(0.000615), off-path exp(0.000015); renormalized
  // by the on-path weight.
  EXPECT_DOUBLE_EQ(g.weight(lo + 1), 1.0);
  EXPECT_NEAR(g.weight(lo), std::exp(0.000015 - 0.000615), 1e-15);
  q[lo] = 0.0;
  EXPECT_THROW(update_weights(g, path, reward, q, 0.01, 0.00075), std::logic_error);
}

TEST(Update, UniformRewardLeavesLayerChoiceUnchanged) {
  auto g = TransitionGraph::build(250.0, reference_costs(), 2, 0);
  std::mt19937_64 rng(12);
  randomize(g, rng);
  const auto cover = covering_paths(g);
  const auto before = edge_probabilities(g, cover, 0.0);
  // Same q everywhere and zero reward: identical estimate on every edge.
  std::vector<double> q(g.num_edges(), 0.3);
  const double rewards[] = {0.0, 0.0};
  update_weights(g, oracle::all_paths(g).front(), rewards, q, 0.01, 0.5);
  const auto after = edge_probabilities(g, cover, 0.0);
  for (std::size_t e = 0; e < g.num_edges(); ++e) EXPECT_NEAR(after[e], before[e], 1e-12);
}

TEST(Update, WeightsStayFiniteOverLongRuns) {
  CrlAgent agent(500.0, reference_costs(), 5, 0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  const CrlParams params;
  for (int round = 0; round < 10000; ++round) {
    const auto path = agent.sample(params.gamma, rng);
    EXPECT_LE(agent.graph().path_cost(path), 500.0 + 1e-9);
    agent.refresh(params.gamma);
    const double rewards[] = {r(rng), r(rng), r(rng), r(rng), r(rng)};
    agent.update(path, rewards, params.beta, params.eta);
  }
  for (const auto& e : agent.graph().edges()) {
    EXPECT_GT(e.weight, 0.0);
    EXPECT_TRUE(std::isfinite(e.weight));
  }
}

TEST(CrlRound, NoBudgetMeansNoReward) {
  auto s = fixture::blank(3, 2, 2, 2, 0.0);
  auto agents = make_agents(s.config);
  std::mt19937_64 rng(14);
  const auto r = crl_round(s, agents, CrlParams{}, rng);
  EXPECT_EQ(r.delivered, 0);
  for (double x : r.rewards) EXPECT_EQ(x, 0.0);
  for (const auto& a : agents) {
    for (const auto& e : a.graph().edges()) EXPECT_GT(e.weight, 0.0);
  }
}

TEST(CrlRound, LearnsToTransmit) {
  auto s = fixture::blank(1, 1, 3, 1, 500.0);
  auto agents = make_agents(s.config);
  const CrlParams params;
  auto transmit_mass = [&] {
    const auto& g = agents[0].graph();
    const auto q = edge_probabilities(g, agents[0].cover(), params.gamma);
    double mass = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (g.edges()[e].layer < g.num_frames() && g.edges()[e].level != g.off_level()) mass += q[e];
    }
    return mass;
  };
  const double initial = transmit_mass();
  std::mt19937_64 rng(15);
  for (int round = 0; round < 50; ++round) crl_round(s, agents, params, rng);
  EXPECT_GT(transmit_mass(), initial);
}

TEST(CrlRound, RewardsAreNormalizedFrameCounts) {
  const ScenarioStream stream(NetworkConfig{}, RadioParams{}, TrafficSpec{100, 200}, 3);
  const auto rounds = run_crl(stream, CrlParams{}, 3);
  ASSERT_EQ(rounds.size(), 50u);
  for (const auto& r : rounds) {
    int total = 0;
    for (std::size_t t = 0; t < r.frames.size(); ++t) {
      EXPECT_DOUBLE_EQ(r.rewards[t], r.frames[t].served_total / 10.0);
      total += r.frames[t].served_total;
    }
    EXPECT_EQ(total, r.delivered);
    for (double e : r.energy_spent) EXPECT_LE(e, 500.0 + 1e-9);
  }
}

TEST(CrlRound, DeterministicAndFast) {
  const ScenarioStream stream(NetworkConfig{}, RadioParams{}, TrafficSpec{}, 21);
  const auto start = std::chrono::steady_clock::now();
  const auto a = run_crl(stream, CrlParams{}, 21);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto b = run_crl(stream, CrlParams{}, 21);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].delivered, b[k].delivered);
    EXPECT_EQ(a[k].levels, b[k].levels);
  }
  EXPECT_LT(seconds, 10.0);
}

TEST(CrlParams, Validation) {
  CrlParams p;
  p.gamma = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = CrlParams{};
  p.eta = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
