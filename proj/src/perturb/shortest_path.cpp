#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "advlcd/error.hpp"
#include "advlcd/perturb.hpp"

namespace advlcd {

void extend_with_walk(const LabeledGraph& g, std::vector<EdgeFlip>& flips, std::size_t target,
                      Rng& rng);

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> dijkstra(const LabeledGraph& g, NodeId source) {
  std::vector<double> dist(g.node_count(), kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (NodeId u : g.neighbors(v)) {
      const double nd = d + *g.edge_weight(v, u);
      if (nd < dist[u]) {
        dist[u] = nd;
        queue.emplace(nd, u);
      }
    }
  }
  return dist;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool connected_without(const LabeledGraph& g, NodeId s, NodeId t, NodeId cut_u, NodeId cut_v) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (v == t) return true;
    for (NodeId u : g.neighbors(v)) {
      if ((v == cut_u && u == cut_v) || (v == cut_v && u == cut_u)) continue;
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return false;
}

bool flipped(const std::vector<EdgeFlip>& flips, NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return std::any_of(flips.begin(), flips.end(),
                     [&](const EdgeFlip& f) { return f.u == u && f.v == v; });
}

// Alternating remove/add schedule for one (s, t) pair, continuing from the
// flips already collected in `flips` (which produced `current`).
// Returns when the budget is met or no flip applies to this pair.
void run_pair(LabeledGraph& current, NodeId s, NodeId t,
              std::size_t beta, double add_weight, std::vector<EdgeFlip>& flips) {
  bool removal_turn = true;
  while (flips.size() < beta) {
    const auto path = shortest_path(current, s, t);
    if (path.empty()) return;

    auto try_remove = [&]() -> bool {
      std::optional<std::size_t> best;
      double best_weight = -1.0;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (flipped(flips, path[i], path[i + 1])) continue;
        const double w = *current.edge_weight(path[i], path[i + 1]);
        if (w > best_weight) {
          best_weight = w;
          best = i;
        }
      }
      if (!best) return false;
      const NodeId a = path[*best];
      const NodeId b = path[*best + 1];
      if (!connected_without(current, s, t, a, b)) return false;
      EdgeFlip flip{std::min(a, b), std::max(a, b), FlipKind::Remove, std::nullopt};
      flips.push_back(flip);
      current = apply_flips(current, std::span<const EdgeFlip>(&flip, 1));
      return true;
    };
    auto try_add = [&]() -> bool {
      if (current.has_edge(s, t) || flipped(flips, s, t)) return false;
      EdgeFlip flip{std::min(s, t), std::max(s, t), FlipKind::Add, add_weight};
      flips.push_back(flip);
      current = apply_flips(current, std::span<const EdgeFlip>(&flip, 1));
      return true;
    };

    const bool done = removal_turn ? (try_remove() || try_add()) : (try_add() || try_remove());
    if (!done) return;
    removal_turn = !removal_turn;
  }
}

}  // namespace

std::vector<NodeId> shortest_path(const LabeledGraph& g, NodeId s, NodeId t) {
  const auto from_s = dijkstra(g, s);
  if (from_s[t] == kInf) return {};
  const auto to_t = dijkstra(g, t);
  const double total = from_s[t];

  std::vector<NodeId> path{s};
  std::vector<char> on_path(g.node_count(), 0);
  on_path[s] = 1;
  NodeId at = s;
  while (at != t) {
    std::optional<NodeId> step;
    for (NodeId u : g.neighbors(at)) {  // ascending, so the first match is smallest
      if (on_path[u]) continue;
      const double w = *g.edge_weight(at, u);
      if (close(from_s[at] + w, from_s[u]) && close(from_s[u] + to_t[u], total)) {
        step = u;
        break;
      }
    }
    if (!step) return {};  // only reachable through zero-weight cycles
    at = *step;
    on_path[at] = 1;
    path.push_back(at);
  }
  return path;
}

std::vector<EdgeFlip> shortest_path_flips(const LabeledGraph& g, NodeId s, NodeId t,
                                          std::size_t beta) {
  std::vector<EdgeFlip> flips;
  LabeledGraph current = g;
  run_pair(current, s, t, beta, g.mean_edge_weight(), flips);
  return flips;
}

std::vector<PerturbationPlan> plan_shortest_path(const LabeledGraph& g, const Budget& budget,
                                                 std::size_t k_candidates, Rng& rng) {
  const std::size_t beta = budget.beta();
  const std::size_t n = g.node_count();
  const std::size_t pairs = n * (n - 1) / 2;
  if (beta > pairs) {
    fail(ErrorCode::BudgetExceedsPairs, "budget " + std::to_string(beta) + " exceeds the " +
                                            std::to_string(pairs) + " available node pairs");
  }
  const double add_weight = g.mean_edge_weight();
  constexpr std::size_t kMaxPairDraws = 64;

  std::vector<PerturbationPlan> plans;
  plans.reserve(k_candidates);
  for (std::size_t i = 0; i < k_candidates; ++i) {
    const std::uint64_t seed = rng();
    Rng plan_rng(seed);
    PerturbationPlan plan{{}, to_string(Strategy::ShortestPath), seed};
    LabeledGraph current = g;
    std::size_t draws = 0;
    while (plan.flips.size() < beta && draws < kMaxPairDraws) {
      // Pairs connected in the current (partially perturbed) graph.
      std::vector<int> component(n, -1);
      int components = 0;
      for (NodeId root = 0; root < n; ++root) {
        if (component[root] >= 0) continue;
        std::vector<NodeId> stack{root};
        component[root] = components;
        while (!stack.empty()) {
          const NodeId v = stack.back();
          stack.pop_back();
          for (NodeId u : current.neighbors(v)) {
            if (component[u] < 0) {
              component[u] = components;
              stack.push_back(u);
            }
          }
        }
        ++components;
      }
      std::vector<std::pair<NodeId, NodeId>> connected;
      for (NodeId s = 0; s < n; ++s) {
        for (NodeId t = s + 1; t < n; ++t) {
          if (component[s] == component[t]) connected.emplace_back(s, t);
        }
      }
      if (connected.empty()) break;
      const auto [s, t] = connected[uniform_index(plan_rng, connected.size())];
      ++draws;
      run_pair(current, s, t, beta, add_weight, plan.flips);
    }
    if (plan.flips.size() < beta) {
      plan.strategy += ">random_walk";
      extend_with_walk(g, plan.flips, beta, plan_rng);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace advlcd
