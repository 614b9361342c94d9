#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "advlcd/perturb.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace advlcd;
using oracle::make_graph;
using testutil::code_of;

namespace {

bool applicable(const LabeledGraph& g, const std::vector<EdgeFlip>& flips) {
  try {
    apply_flips(g, flips);
  } catch (const Error&) {
    return false;
  }
  return true;
}

bool distinct_pairs(const std::vector<EdgeFlip>& flips) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& f : flips) {
    if (!seen.insert({std::min(f.u, f.v), std::max(f.u, f.v)}).second) return false;
  }
  return true;
}

}  // namespace

TEST(Budget, CeilOfRatioTimesSquare) {
  EXPECT_EQ(Budget(0.0003, 30).beta(), 1u);
  EXPECT_EQ(Budget(0.001, 30).beta(), 1u);
  EXPECT_EQ(Budget(0.002, 30).beta(), 2u);
  EXPECT_EQ(Budget(0.003, 30).beta(), 3u);
  EXPECT_EQ(Budget(0.003, 35).beta(), 4u);
  EXPECT_EQ(Budget(0.1, 10).beta(), 10u);
  EXPECT_EQ(Budget(1e-9, 10).beta(), 1u);
  EXPECT_EQ(Budget(1.0, 3).beta(), 3u);  // capped at n(n-1)/2
  EXPECT_EQ(code_of([] { Budget(0.0, 10); }), ErrorCode::InvalidConfig);
}

TEST(Eigencentrality, CompleteGraphIsUniform) {
  const auto k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto c = eigencentrality(k4);
  for (double x : c.x) EXPECT_NEAR(x, 0.5, 1e-9);
  EXPECT_NEAR(c.lambda_max, 3.0, 1e-9);
}

TEST(Eigencentrality, StarCenterDominates) {
  const auto star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto c = eigencentrality(star);
  for (NodeId v = 1; v < 5; ++v) EXPECT_GT(c.x[0], c.x[v]);
  EXPECT_NEAR(c.lambda_max, 2.0, 1e-9);
}

TEST(Eigencentrality, MatchesJacobiOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_graph(rng, 3 + rng() % 10, 0.4);
    const auto c = eigencentrality(g);
    double norm = 0.0;
    for (double x : c.x) {
      EXPECT_GE(x, 0.0);
      norm += x * x;
    }
    EXPECT_NEAR(norm, 1.0, 1e-9);
    if (g.edge_count() == 0) continue;
    const auto a = oracle::adjacency(g);
    const auto e = oracle::jacobi(a);
    const double top = *std::max_element(e.values.begin(), e.values.end());
    EXPECT_NEAR(c.lambda_max, top, 1e-7);
    // Disconnected graphs have a degenerate top eigenspace; power iteration
    // must still land inside it.
    EXPECT_NEAR(oracle::dominant_alignment(a, c.x), 1.0, 1e-6);
  }
}

TEST(Eigencentrality, PermutationEquivariantAndWeightBlind) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_graph(rng, 8, 0.5);
    const auto perm = oracle::random_permutation(rng, g.node_count());
    const auto a = eigencentrality(g);
    const auto b = eigencentrality(oracle::permute(g, perm));
    for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_NEAR(a.x[v], b.x[perm[v]], 1e-8);

    std::vector<Edge> reweighted = g.edges();
    for (auto& e : reweighted) e.weight = 7.5;
    const auto c = eigencentrality(LabeledGraph("w", g.nodes(), reweighted));
    for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_DOUBLE_EQ(a.x[v], c.x[v]);
  }
}

TEST(EigencentralityPlan, StarFlipsCenterPairsFirst) {
  const auto star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto plans = plan_eigencentrality(star, Budget(1e-9, 5), 4);
  ASSERT_EQ(plans.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(plans[i].flips.size(), 1u);
    EXPECT_EQ(plans[i].flips[0].u, 0u);
    EXPECT_EQ(plans[i].flips[0].v, i + 1);
    EXPECT_EQ(plans[i].flips[0].kind, FlipKind::Remove);
  }
}

TEST(EigencentralityPlan, TriangleTieBreakIsLexicographic) {
  const auto k3 = make_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  const auto plans = plan_eigencentrality(k3, Budget(1e-9, 3), 1);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].flips[0].u, 0u);
  EXPECT_EQ(plans[0].flips[0].v, 1u);
}

TEST(EigencentralityPlan, SlidingWindowMatchesOracleRanking) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_graph(rng, 10, 0.35);
    const Budget budget(0.03, 10);
    ASSERT_EQ(budget.beta(), 3u);
    const auto plans = plan_eigencentrality(g, budget, 5);
    const auto ranked = oracle::ranked_pairs(eigencentrality(g).x);
    ASSERT_EQ(plans.size(), 5u);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      ASSERT_EQ(plans[i].flips.size(), 3u);
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(plans[i].flips[j].u, ranked[i + j].first);
        EXPECT_EQ(plans[i].flips[j].v, ranked[i + j].second);
      }
      EXPECT_TRUE(applicable(g, plans[i].flips));
    }
  }
}

TEST(Plans, BudgetBeyondPairsThrows) {
  const auto single = make_graph(1, {});
  Rng rng(1);
  EXPECT_EQ(code_of([&] { plan_eigencentrality(single, Budget(0.5, 1), 1); }),
            ErrorCode::BudgetExceedsPairs);
  EXPECT_EQ(code_of([&] { plan_random_walk(single, Budget(0.5, 1), 1, rng); }),
            ErrorCode::BudgetExceedsPairs);
}

TEST(RandomWalk, TrianglePairsAreUniform) {
  const auto k3 = make_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  std::map<std::pair<NodeId, NodeId>, int> hits;
  const int trials = 1000;
  for (int seed = 0; seed < trials; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const auto plans = plan_random_walk(k3, Budget(1e-9, 3), 1, rng);
    ASSERT_EQ(plans[0].flips.size(), 1u);
    ++hits[{plans[0].flips[0].u, plans[0].flips[0].v}];
  }
  ASSERT_EQ(hits.size(), 3u);
  for (const auto& [pair, count] : hits) EXPECT_NEAR(count / double(trials), 1.0 / 3.0, 0.05);
}

TEST(RandomWalk, EdgelessGraphGetsAdditions) {
  const auto empty = make_graph(4, {});
  Rng rng(5);
  const auto plans = plan_random_walk(empty, Budget(0.1, 4), 3, rng);
  ASSERT_EQ(plans.size(), 3u);
  for (const auto& plan : plans) {
    ASSERT_EQ(plan.flips.size(), 2u);
    for (const auto& f : plan.flips) EXPECT_EQ(f.kind, FlipKind::Add);
    EXPECT_TRUE(distinct_pairs(plan.flips));
    EXPECT_EQ(apply_flips(empty, plan.flips).edge_count(), 2u);
  }
}

TEST(RandomWalk, DeterministicInSeed) {
  std::mt19937_64 gen(1);
  const auto g = oracle::random_graph(gen, 12, 0.3);
  Rng a(99), b(99);
  const auto pa = plan_random_walk(g, Budget(0.02, 12), 6, a);
  const auto pb = plan_random_walk(g, Budget(0.02, 12), 6, b);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].flips, pb[i].flips);
}

TEST(ShortestPath, LexicographicTieBreak) {
  // Two equal-weight routes 0-1-3 and 0-2-3.
  const auto g = make_graph(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  EXPECT_EQ(shortest_path(g, 0, 3), (std::vector<NodeId>{0, 1, 3}));
  EXPECT_TRUE(shortest_path(make_graph(3, {{0, 1}}), 0, 2).empty());
}

TEST(ShortestPath, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_graph(rng, 7, 0.45);
    const NodeId s = rng() % 7;
    NodeId t = rng() % 7;
    if (t == s) t = (s + 1) % 7;
    const auto expected = oracle::all_paths_shortest(g, s, t);
    EXPECT_EQ(shortest_path(g, s, t), expected.nodes);
  }
}

TEST(ShortestPath, BridgeIsKeptAndShortcutAdded) {
  const auto path = make_graph(3, {{0, 1}, {1, 2}});
  const auto flips = shortest_path_flips(path, 0, 2, 2);
  ASSERT_FALSE(flips.empty());
  EXPECT_EQ(flips[0].kind, FlipKind::Add);
  EXPECT_EQ(flips[0].u, 0u);
  EXPECT_EQ(flips[0].v, 2u);
  EXPECT_TRUE(distinct_pairs(flips));
  EXPECT_TRUE(applicable(path, flips));
}

TEST(ShortestPath, RemovesHeaviestEdgeOfShortestRoute) {
  // 4-cycle: route 0-1-2 weighs 1 + 2, route 0-3-2 weighs 4 + 4.
  const auto cycle = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {}, {1.0, 2.0, 4.0, 4.0});
  const auto route = oracle::all_paths_shortest(cycle, 0, 2);
  ASSERT_EQ(route.nodes, (std::vector<NodeId>{0, 1, 2}));
  const auto flips = shortest_path_flips(cycle, 0, 2, 2);
  ASSERT_EQ(flips.size(), 2u);
  EXPECT_EQ(flips[0].kind, FlipKind::Remove);
  EXPECT_EQ(flips[0].u, 1u);
  EXPECT_EQ(flips[0].v, 2u);
  EXPECT_EQ(flips[1].kind, FlipKind::Add);
  EXPECT_EQ(flips[1].u, 0u);
  EXPECT_EQ(flips[1].v, 2u);
}

TEST(ShortestPath, EdgelessGraphFallsBackToWalk) {
  const auto empty = make_graph(5, {});
  Rng rng(4);
  const auto plans = plan_shortest_path(empty, Budget(0.05, 5), 2, rng);
  ASSERT_EQ(plans.size(), 2u);
  for (const auto& plan : plans) {
    EXPECT_EQ(plan.strategy, "shortest_path>random_walk");
    EXPECT_EQ(plan.flips.size(), 2u);
  }
}

TEST(ShortestPath, DeterministicInSeed) {
  std::mt19937_64 gen(8);
  const auto g = oracle::random_graph(gen, 12, 0.3);
  Rng a(5), b(5);
  const auto pa = plan_shortest_path(g, Budget(0.02, 12), 5, a);
  const auto pb = plan_shortest_path(g, Budget(0.02, 12), 5, b);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].flips, pb[i].flips);
}

TEST(Plans, RespectBudgetAndApply) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + gen() % 20;
    const auto g = oracle::random_graph(gen, n, 0.25);
    const Budget budget(0.004 * (1 + gen() % 5), n);
    Rng rng(gen());
    std::vector<PerturbationPlan> plans = plan_random_walk(g, budget, 4, rng);
    for (auto& p : plan_shortest_path(g, budget, 4, rng)) plans.push_back(p);
    if (budget.beta() + 4 <= budget.pair_count()) {
      for (auto& p : plan_eigencentrality(g, budget, 4)) plans.push_back(p);
    }
    for (const auto& plan : plans) {
      EXPECT_LE(plan.flips.size(), budget.beta());
      EXPECT_TRUE(distinct_pairs(plan.flips));
      EXPECT_TRUE(applicable(g, plan.flips));
      EXPECT_EQ(edge_symmetric_difference(g, apply_flips(g, plan.flips)), plan.flips.size());
    }
  }
}
