#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advlcd/graph.hpp"
#include "advlcd/sparse.hpp"

namespace advlcd {

using LabelId = std::uint32_t;

/// Anything that maps compressed-label strings to ids, inserting new ones.
class LabelSink {
 public:
  virtual ~LabelSink() = default;
  virtual LabelId intern(std::string_view key) = 0;
};

/// Append-only bijection between compressed-label strings and dense ids.
/// Ids are assigned in insertion order, so the same graphs processed in the
/// same order always produce the same ids.
class LabelDictionary final : public LabelSink {
 public:
  LabelId intern(std::string_view key) override;
  std::optional<LabelId> find(std::string_view key) const;
  const std::string& key(LabelId id) const { return keys_.at(id); }
  std::size_t size() const noexcept { return keys_.size(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  static LabelDictionary from_keys(std::vector<std::string> keys);

 private:
  std::unordered_map<std::string, LabelId> ids_;
  std::vector<std::string> keys_;
};

/// Read-through extension of a frozen dictionary: known keys resolve to the
/// base ids, unseen keys get fresh ids past the base. The base never changes.
class DictionaryOverlay final : public LabelSink {
 public:
  explicit DictionaryOverlay(const LabelDictionary& base) : base_(base) {}
  LabelId intern(std::string_view key) override;
  std::size_t added() const noexcept { return local_.size(); }

 private:
  const LabelDictionary& base_;
  std::unordered_map<std::string, LabelId> local_;
};

/// h = 0 labels: the raw node labels.
std::vector<LabelId> wl_initial_labels(const LabeledGraph& g, LabelSink& dict);

/// One refinement: node v's new label compresses (own label, sorted neighbor
/// labels). `iteration` is the index of the labels being produced (>= 1) and
/// keeps the id spaces of different iterations disjoint.
std::vector<LabelId> wl_relabel_step(const LabeledGraph& g, const std::vector<LabelId>& labels,
                                     std::size_t iteration, LabelSink& dict);

/// Concatenated label histograms for h = 0..H.
struct WlFeatureVector {
  struct Entry {
    std::uint32_t iteration = 0;
    LabelId label = 0;
    std::uint32_t count = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  std::size_t iterations = 0;  ///< H
  std::vector<Entry> entries;  ///< sorted by label id

  SparseVector to_sparse() const;
  std::vector<std::size_t> counts_per_iteration() const;
  friend bool operator==(const WlFeatureVector&, const WlFeatureVector&) = default;
};

constexpr std::size_t kDefaultWlIterations = 3;

WlFeatureVector wl_feature_vector(const LabeledGraph& g, std::size_t iterations,
                                  LabelSink& dict);

/// Extracts vectors for a list of graphs with a shared dictionary. Each
/// iteration computes signatures (in parallel when workers > 1) and then
/// interns them in graph order, so ids do not depend on the worker count.
std::vector<WlFeatureVector> wl_feature_vectors(const std::vector<LabeledGraph>& graphs,
                                                std::size_t iterations,
                                                LabelDictionary& dict,
                                                std::size_t workers = 1);

/// K[i][j] = <phi(g_i), phi(g_j)>, optionally cosine-normalized.
DenseMatrix wl_kernel_matrix(const std::vector<LabeledGraph>& graphs, std::size_t iterations,
                             bool normalize = false);

}  // namespace advlcd
