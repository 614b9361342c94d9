#include <algorithm>

#include "advlcd/error.hpp"
#include "advlcd/perturb.hpp"

namespace advlcd {

namespace {

bool contains_pair(const std::vector<EdgeFlip>& flips, NodeId u, NodeId v) {
  return std::any_of(flips.begin(), flips.end(),
                     [&](const EdgeFlip& f) { return f.u == u && f.v == v; });
}

}  // namespace

// Shared with the shortest-path fallback: extends `flips` with walk pairs
// until it holds `target` flips. A nominal walk of 4*beta steps yields the
// same first pairs, so the walk simply continues until enough distinct pairs
// have been seen; callers guarantee target <= number of node pairs.
void extend_with_walk(const LabeledGraph& g, std::vector<EdgeFlip>& flips, std::size_t target,
                      Rng& rng) {
  const std::size_t n = g.node_count();
  const double add_weight = g.mean_edge_weight();
  NodeId at = static_cast<NodeId>(uniform_index(rng, n));
  while (flips.size() < target) {
    const NodeId next = static_cast<NodeId>(uniform_index(rng, n));
    if (next != at) {
      const NodeId u = std::min(at, next);
      const NodeId v = std::max(at, next);
      if (!contains_pair(flips, u, v)) {
        EdgeFlip flip = EdgeFlip::toggle(g, u, v);
        if (flip.kind == FlipKind::Add) flip.weight = add_weight;
        flips.push_back(flip);
      }
    }
    at = next;
  }
}

std::vector<PerturbationPlan> plan_random_walk(const LabeledGraph& g, const Budget& budget,
                                               std::size_t k_candidates, Rng& rng) {
  const std::size_t beta = budget.beta();
  const std::size_t pairs = g.node_count() * (g.node_count() - 1) / 2;
  if (beta > pairs) {
    fail(ErrorCode::BudgetExceedsPairs, "budget " + std::to_string(beta) + " exceeds the " +
                                            std::to_string(pairs) + " available node pairs");
  }
  std::vector<PerturbationPlan> plans;
  plans.reserve(k_candidates);
  for (std::size_t i = 0; i < k_candidates; ++i) {
    const std::uint64_t seed = rng();
    Rng plan_rng(seed);
    PerturbationPlan plan{{}, to_string(Strategy::RandomWalk), seed};
    extend_with_walk(g, plan.flips, beta, plan_rng);
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace advlcd
