#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "fixtures.hpp"
#include "noma/baselines.hpp"

using namespace noma;

namespace {

QTable reference_table(double budget = 500.0) {
  std::vector<double> costs;
  for (double level : NetworkConfig{}.power_levels_dbm) costs.push_back(action_cost(level));
  return QTable(TransitionGraph::build(budget, costs, 5, 0));
}

}  // namespace

TEST(QTable, EntriesOnlyForLegalActions) {
  const auto q = reference_table(120.0);
  const auto& g = q.graph();
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const int state = static_cast<int>(v);
    if (q.is_terminal(state)) continue;
    for (int level = 0; level < 4; ++level) {
      const bool affordable = g.cost(level) <= g.nodes()[v].energy + 1e-9;
      EXPECT_EQ(q.has_entry(state, level), affordable) << "state " << v << " level " << level;
    }
  }
  EXPECT_EQ(q.size(), static_cast<std::size_t>(g.layer_edge_range(g.num_frames() - 1).second));
}

TEST(TqlAct, GreedyAndTies) {
  auto q = reference_table();
  std::mt19937_64 rng(1);
  const int s = q.graph().source();
  EXPECT_EQ(tql_act(q, s, 0.0, rng), 0);  // all equal: lowest power
  q.set_value(s, 2, 0.7);
  q.set_value(s, 3, 0.3);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(tql_act(q, s, 0.0, rng), 2);
}

TEST(TqlAct, FullExplorationIsUniform) {
  auto q = reference_table();
  q.set_value(q.graph().source(), 3, 5.0);
  std::mt19937_64 rng(2);
  std::map<int, int> counts;
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++counts[tql_act(q, q.graph().source(), 1.0, rng)];
  double chi2 = 0.0;
  for (int level = 0; level < 4; ++level) chi2 += std::pow(counts[level] - n / 4.0, 2) / (n / 4.0);
  const boost::math::chi_squared dist(3.0);
  EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 0.01)));
}

TEST(TqlUpdate, Arithmetic) {
  auto q = reference_table();
  const auto& g = q.graph();
  const int s = g.source();
  const int e = q.edge_for(s, 1);
  const int next = g.edges()[e].to;
  tql_update(q, s, 1, 1.0, next, 0.5);
  EXPECT_DOUBLE_EQ(q.value(s, 1), 0.5);
  tql_update(q, s, 1, 0.0, next, 0.5);
  EXPECT_DOUBLE_EQ(q.value(s, 1), 0.25);
  // Fixed point: Q = r + max next.
  q.set_value(next, 0, 0.4);
  q.set_value(s, 1, 0.6);
  tql_update(q, s, 1, 0.2, next, 0.5);
  EXPECT_DOUBLE_EQ(q.value(s, 1), 0.6);
  EXPECT_THROW(tql_update(q, s, 1, 0.0, s, 0.5), std::invalid_argument);
}

TEST(TqlTrain, EmptyAndDeterministic) {
  const ScenarioStream stream(NetworkConfig{}, RadioParams{}, TrafficSpec{}, 4);
  TqlParams none;
  none.episodes = 0;
  EXPECT_TRUE(tql_train(stream, none, 4).empty());
  const auto a = tql_train(stream, TqlParams{}, 4);
  const auto b = tql_train(stream, TqlParams{}, 4);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].delivered, b[k].delivered);
    EXPECT_EQ(std::accumulate(a[k].frame_delivered.begin(), a[k].frame_delivered.end(), 0), a[k].delivered);
    for (double e : a[k].energy_spent) EXPECT_LE(e, 500.0 + 1e-9);
  }
}

TEST(TqlTrain, SingleDeviceLearnsToTransmit) {
  NetworkConfig cfg;
  cfg.num_devices = 1;
  cfg.group_cap = 1;
  const ScenarioStream stream(cfg, RadioParams{}, TrafficSpec{}, 5);
  TqlParams params;
  params.episodes = 500;
  const auto curve = tql_train(stream, params, 5);
  EXPECT_GE(curve.back().delivered, 1);
}

TEST(TqlTrain, LearningCurveImproves) {
  double first = 0.0;
  double last = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScenarioStream stream(NetworkConfig{}, RadioParams{}, TrafficSpec{100, 200}, seed);
    const auto curve = tql_train(stream, TqlParams{}, seed);
    for (int k = 0; k < 5; ++k) {
      first += curve[k].delivered;
      last += curve[curve.size() - 1 - k].delivered;
    }
  }
  EXPECT_GE(last, first);
}

TEST(MaxPower, Anchors) {
  auto broke = fixture::blank(2, 1, 2, 1, 0.0);
  EXPECT_EQ(max_power_baseline(broke).delivered, 0);
  auto once = fixture::blank(1, 1, 3, 1, 200.0);
  const auto r = max_power_baseline(once);
  EXPECT_EQ(r.delivered, 1);
  EXPECT_EQ(r.frame_delivered, (std::vector<int>{1, 0, 0}));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate_scenario(NetworkConfig{}, RadioParams{}, TrafficSpec{}, seed);
    const auto res = max_power_baseline(s);
    EXPECT_GE(res.delivered, 0);
    EXPECT_LE(res.delivered, s.config.frame_capacity() * s.num_frames());
    for (double e : res.energy_spent) EXPECT_LE(e, s.config.energy_budget + 1e-9);
  }
}
