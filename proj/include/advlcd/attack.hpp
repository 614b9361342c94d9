#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advlcd/graph.hpp"
#include "advlcd/perturb.hpp"
#include "advlcd/query.hpp"
#include "json.hpp"

// The attack engine sees the victim only through QueryOracle/TargetService.

namespace advlcd {

enum class SurrogateKind : std::uint8_t { SvmRbf, SvmLinear, SvmPoly, NaiveBayes };

const char* to_string(SurrogateKind kind) noexcept;
SurrogateKind parse_surrogate(const std::string& text);

struct AttackConfig {
  double r = 3e-4;
  Strategy strategy = Strategy::Eigencentrality;
  SurrogateKind surrogate = SurrogateKind::SvmRbf;
  std::size_t max_queries = 50;  ///< per attacked graph
  std::size_t k_candidates = 10;
  std::size_t rounds = 10;
  std::size_t epochs = 200;  ///< surrogate SMO pass cap
  std::size_t wl_iterations = 3;
  double surrogate_c = 1.0;
  std::size_t fresh_plans_per_round = 30;
  std::size_t mutations_per_round = 40;
  std::uint64_t seed = 42;
  double lambda = 0.1;  ///< reserved; accepted and echoed, never read

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static AttackConfig from_json(const nlohmann::json& doc);
};

/// One query of a perturbed graph; also one surrogate training row.
struct AttackRecord {
  GraphDigest digest;
  std::vector<EdgeFlip> flips;  ///< relative to the original graph
  Observation observed;
  double loss = 0.0;
  bool success = false;
  std::size_t query_index = 0;
  std::size_t round = 0;
};

struct SurrogateDiagnostics {
  std::size_t rounds_trained = 0;
  std::size_t fallbacks = 0;  ///< rounds that fell back to strategy order
  std::vector<std::string> notes;
};

struct AttackOutcome {
  LabeledGraph best_graph;
  std::vector<EdgeFlip> best_flips;
  double best_loss = 0.0;
  bool success = false;
  std::size_t queries_used = 0;
  std::size_t beta = 0;
  std::vector<AttackRecord> records;
  SurrogateDiagnostics diagnostics;
};

/// Black-box evasion of one graph with true label y. Round 0 queries
/// k_candidates strategy plans. Each later round trains the surrogate on all
/// records so far, scores a pool of fresh strategy plans plus one-flip
/// mutations of the incumbent (never more than beta flips from the
/// original), and queries the k_candidates most promising unseen
/// candidates. Stops on the first prediction flip, after `rounds` rounds, or
/// when the query budget runs out. Deterministic in `seed`.
AttackOutcome attack_one(QueryOracle& oracle, const LabeledGraph& g, ClassLabel y,
                         const AttackConfig& cfg, std::uint64_t seed);

/// Surrogate labels for a set of losses: +1 for a flip (loss > 0.5) when any
/// exists, otherwise +1 for losses above the median. Empty when the labels
/// would be single-class.
std::vector<int> surrogate_labels(const std::vector<double>& losses);

struct GraphAttackResult {
  std::string graph_id;
  ClassLabel y = ClassLabel::Loop;
  ClassLabel clean_label = ClassLabel::Loop;
  bool clean_correct = false;
  bool attacked = false;  ///< false when the clean prediction was already wrong
  bool attacked_correct = false;
  std::optional<AttackOutcome> outcome;
};

struct AttackSummary {
  AttackConfig config;
  std::vector<GraphAttackResult> graphs;
  std::size_t clean_correct = 0;
  std::size_t attacked_correct = 0;
  double clean_accuracy = 0.0;
  double attacked_accuracy = 0.0;
  double decline_pp = 0.0;  ///< negative: accuracy lost, percentage points

  nlohmann::ordered_json to_json(bool include_records = true) const;
};

/// Attacks every graph of `test` independently (fresh session and budget per
/// graph; per-graph seeds derived from cfg.seed and the graph id, so the
/// result does not depend on `workers`). Graphs the victim already
/// misclassifies are counted as misclassified without being attacked.
AttackSummary attack_testset(const TargetService& target, const GraphDataset& test,
                             const AttackConfig& cfg, std::size_t workers = 1);

/// Post-hoc check of an outcome's records: digests match the original with
/// the recorded flips applied, every record stays within beta flips, flips
/// are distinct pairs, and the record count respects the budget. Returns a
/// description of each violation.
std::vector<std::string> audit_outcome(const LabeledGraph& original, const AttackOutcome& outcome,
                                       std::size_t max_queries);

}  // namespace advlcd
