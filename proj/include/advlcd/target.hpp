#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "advlcd/graph.hpp"
#include "advlcd/learners.hpp"
#include "advlcd/query.hpp"
#include "advlcd/wl.hpp"

namespace advlcd {

/// The victim: an SVM over WL feature vectors with a frozen label
/// dictionary. Queries extend the dictionary through an overlay, so trained
/// ids never shift.
class TargetModel {
 public:
  TargetModel(TrainedSvm svm, LabelDictionary dictionary, std::size_t wl_iterations);

  /// Calibrated decision: label +1 iff P(+1) >= 0.5; the confidence is the
  /// probability of the returned label.
  Observation predict(const LabeledGraph& g, OracleMode mode = OracleMode::Score) const;

  const TrainedSvm& svm() const noexcept { return svm_; }
  const LabelDictionary& dictionary() const noexcept { return dictionary_; }
  std::size_t wl_iterations() const noexcept { return wl_iterations_; }

 private:
  TrainedSvm svm_;
  LabelDictionary dictionary_;
  std::size_t wl_iterations_;
};

struct TargetTrainOptions {
  std::size_t wl_iterations = kDefaultWlIterations;
  double C = 1.0;
  double tol = 1e-3;
  std::size_t max_passes = 100000;
  std::uint64_t seed = 42;
};

struct TargetMetrics {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t support_vectors = 0;
};

struct TrainedTarget {
  std::shared_ptr<const TargetModel> model;
  TargetMetrics metrics;
};

/// Trains on the dataset's train split and evaluates on its test split.
TrainedTarget train_target(const GraphDataset& ds, const TargetTrainOptions& options = {});

inline constexpr const char* kTargetFormat = "target-v1";

std::string target_to_string(const TargetModel& model);
TargetModel target_from_string(const std::string& text);
void save_target(const TargetModel& model, const std::string& path);
TargetModel load_target(const std::string& path);

/// One query made through a ledger.
struct LedgerEntry {
  GraphDigest digest;
  Observation observation;
  std::size_t index = 0;
};

/// Append-only account of the queries of one session.
class QueryLedger {
 public:
  explicit QueryLedger(std::size_t max_queries) : max_queries_(max_queries) {}

  std::size_t count() const noexcept { return entries_.size(); }
  std::size_t max_queries() const noexcept { return max_queries_; }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  const LedgerEntry* find(const GraphDigest& digest) const;
  const LedgerEntry& append(const GraphDigest& digest, const Observation& observation);

 private:
  std::size_t max_queries_;
  std::vector<LedgerEntry> entries_;
  std::unordered_map<GraphDigest, std::size_t, GraphDigestHash> by_digest_;
};

/// QueryOracle backed by a TargetModel and a QueryLedger.
class TargetSession final : public QueryOracle {
 public:
  TargetSession(std::shared_ptr<const TargetModel> model, std::size_t max_queries,
                OracleMode mode = OracleMode::Score);

  Observation query(const LabeledGraph& g) override;
  std::size_t queries_used() const override { return ledger_.count(); }
  std::size_t max_queries() const override { return ledger_.max_queries(); }
  const QueryLedger& ledger() const noexcept { return ledger_; }

 private:
  std::shared_ptr<const TargetModel> model_;
  OracleMode mode_;
  QueryLedger ledger_;
};

class TargetModelService final : public TargetService {
 public:
  explicit TargetModelService(std::shared_ptr<const TargetModel> model,
                              OracleMode mode = OracleMode::Score)
      : model_(std::move(model)), mode_(mode) {}

  std::unique_ptr<QueryOracle> open_session(std::size_t max_queries) const override {
    return std::make_unique<TargetSession>(model_, max_queries, mode_);
  }

 private:
  std::shared_ptr<const TargetModel> model_;
  OracleMode mode_;
};

}  // namespace advlcd
