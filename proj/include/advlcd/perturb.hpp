#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advlcd/graph.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

/// Flip budget beta = max(1, ceil(r * n^2)), capped by the number of node
/// pairs available.
class Budget {
 public:
  Budget(double ratio, std::size_t node_count);

  double ratio() const noexcept { return ratio_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t beta() const noexcept { return beta_; }
  std::size_t pair_count() const noexcept { return node_count_ * (node_count_ - 1) / 2; }

 private:
  double ratio_;
  std::size_t node_count_;
  std::size_t beta_;
};

struct CentralityScores {
  std::vector<double> x;  ///< Unit-norm, non-negative dominant eigenvector.
  double lambda_max = 0.0;
  std::size_t iterations = 0;
};

/// Power iteration on the binary adjacency matrix (edge weights ignored).
/// The iteration runs on A + I, which has the same eigenvectors as A but a
/// strictly dominant Perron root, so bipartite graphs converge. Stops when
/// successive iterates differ by less than `tol` in the max norm; throws
/// ErrorCode::DidNotConverge after `max_iter` iterations.
CentralityScores eigencentrality(const LabeledGraph& g, double tol = 1e-12,
                                 std::size_t max_iter = 100000);

enum class Strategy : std::uint8_t { Eigencentrality, RandomWalk, ShortestPath };

const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(const std::string& text);

struct PerturbationPlan {
  std::vector<EdgeFlip> flips;
  std::string strategy;  ///< Tag; records fallbacks such as "shortest_path>random_walk".
  std::uint64_t seed = 0;
};

struct RankedPair {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
};

/// All unordered pairs ordered by X_u * X_v descending, ties by (u, v).
std::vector<RankedPair> rank_pairs_by_centrality(const CentralityScores& scores);

/// Plan i flips ranked pairs [offset + i, offset + i + beta). Ranking does not
/// consume randomness; `seed` is only recorded on the plans. Plans whose
/// window would run past the last pair are not emitted. Throws
/// ErrorCode::BudgetExceedsPairs if beta exceeds the number of pairs.
std::vector<PerturbationPlan> plan_eigencentrality(const LabeledGraph& g, const Budget& budget,
                                                   std::size_t k_candidates,
                                                   std::uint64_t seed = 0,
                                                   std::size_t offset = 0);

/// Teleporting walk of length 4*beta (extended if needed) from a uniform
/// start; consecutive distinct visited pairs are toggled until beta distinct
/// pairs are collected. One plan per candidate.
std::vector<PerturbationPlan> plan_random_walk(const LabeledGraph& g, const Budget& budget,
                                               std::size_t k_candidates, Rng& rng);

/// Weighted shortest path with the lexicographically smallest node sequence
/// among all minimum-weight s-t paths. Empty when t is unreachable.
std::vector<NodeId> shortest_path(const LabeledGraph& g, NodeId s, NodeId t);

/// Samples a connected pair (s, t) and alternates between removing the
/// heaviest edge on the current s-t shortest path (skipped if that would
/// disconnect s from t) and adding the shortcut (s, t). Edgeless graphs fall
/// back to the random-walk strategy; the plan's tag records the fallback.
std::vector<PerturbationPlan> plan_shortest_path(const LabeledGraph& g, const Budget& budget,
                                                 std::size_t k_candidates, Rng& rng);

/// Single-plan step used by plan_shortest_path with an explicit pair, exposed
/// for deterministic testing. Stops early (returns fewer flips) when neither
/// flip kind applies to this pair.
std::vector<EdgeFlip> shortest_path_flips(const LabeledGraph& g, NodeId s, NodeId t,
                                          std::size_t beta);

}  // namespace advlcd
