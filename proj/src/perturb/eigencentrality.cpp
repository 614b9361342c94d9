#include <algorithm>
#include <cmath>

#include "advlcd/error.hpp"
#include "advlcd/perturb.hpp"

namespace advlcd {

namespace {

void multiply_shifted(const LabeledGraph& g, const std::vector<double>& x,
                      std::vector<double>& out) {
  for (std::size_t v = 0; v < x.size(); ++v) {
    double acc = x[v];
    for (NodeId u : g.neighbors(static_cast<NodeId>(v))) acc += x[u];
    out[v] = acc;
  }
}

double normalize(std::vector<double>& x) {
  double norm = 0.0;
  for (double xi : x) norm += xi * xi;
  norm = std::sqrt(norm);
  for (double& xi : x) xi /= norm;
  return norm;
}

}  // namespace

CentralityScores eigencentrality(const LabeledGraph& g, double tol, std::size_t max_iter) {
  const std::size_t n = g.node_count();
  std::vector<double> x(n, 1.0);
  normalize(x);
  std::vector<double> next(n);

  std::size_t iter = 0;
  for (;;) {
    if (iter >= max_iter) {
      fail(ErrorCode::DidNotConverge,
           "eigencentrality: no convergence after " + std::to_string(max_iter) + " iterations");
    }
    ++iter;
    multiply_shifted(g, x, next);
    normalize(next);
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) delta = std::max(delta, std::abs(next[v] - x[v]));
    x.swap(next);
    if (delta < tol) break;
  }

  // Rayleigh quotient on the unshifted adjacency.
  double lambda = 0.0;
  for (const auto& e : g.edges()) lambda += 2.0 * x[e.u] * x[e.v];
  return CentralityScores{std::move(x), lambda, iter};
}

std::vector<RankedPair> rank_pairs_by_centrality(const CentralityScores& scores) {
  const std::size_t n = scores.x.size();
  struct Keyed {
    long long key;
    RankedPair pair;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(n * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double score = scores.x[u] * scores.x[v];
      // Quantized so products equal up to rounding noise fall to the
      // lexicographic tie-break.
      keyed.push_back({std::llround(score * 1e12), RankedPair{u, v, score}});
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    if (a.pair.u != b.pair.u) return a.pair.u < b.pair.u;
    return a.pair.v < b.pair.v;
  });
  std::vector<RankedPair> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.pair);
  return out;
}

std::vector<PerturbationPlan> plan_eigencentrality(const LabeledGraph& g, const Budget& budget,
                                                   std::size_t k_candidates, std::uint64_t seed,
                                                   std::size_t offset) {
  const std::size_t beta = budget.beta();
  const std::size_t pairs = g.node_count() * (g.node_count() - 1) / 2;
  if (beta > pairs) {
    fail(ErrorCode::BudgetExceedsPairs, "budget " + std::to_string(beta) + " exceeds the " +
                                            std::to_string(pairs) + " available node pairs");
  }
  const auto ranked = rank_pairs_by_centrality(eigencentrality(g));
  const double add_weight = g.mean_edge_weight();
  std::vector<PerturbationPlan> plans;
  for (std::size_t i = 0; i < k_candidates; ++i) {
    const std::size_t start = offset + i;
    if (start + beta > ranked.size()) break;
    PerturbationPlan plan{{}, to_string(Strategy::Eigencentrality), seed};
    for (std::size_t j = start; j < start + beta; ++j) {
      EdgeFlip flip = EdgeFlip::toggle(g, ranked[j].u, ranked[j].v);
      if (flip.kind == FlipKind::Add) flip.weight = add_weight;
      plan.flips.push_back(flip);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace advlcd
