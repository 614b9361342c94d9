#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advlcd {

using NodeId = std::uint32_t;

/// Multi-tier structure: semantic objects anchor clusters of visual features.
enum class Tier : std::uint8_t { Object, Feature };

const char* to_string(Tier tier) noexcept;
Tier parse_tier(const std::string& text);

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Node {
  std::string label;
  Tier tier = Tier::Object;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected graph with categorical node labels and weighted edges.
///
/// Immutable once constructed. The constructor validates the invariants (no
/// self loops, no duplicates, endpoints in range, finite non-negative
/// weights) and stores edges in canonical (u < v, lexicographic) order, so
/// two graphs with equal content compare and serialize identically.
class LabeledGraph {
 public:
  LabeledGraph(std::string id, std::vector<Node> nodes, std::vector<Edge> edges);

  const std::string& id() const noexcept { return id_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(NodeId v) const { return nodes_.at(v); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Sorted neighbor list of v.
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  bool has_edge(NodeId u, NodeId v) const;
  std::optional<double> edge_weight(NodeId u, NodeId v) const;

  /// Mean weight of the current edges, 1.0 for an edgeless graph. New edges
  /// introduced by a perturbation receive this weight.
  double mean_edge_weight() const noexcept;

  /// Same content under a different identifier.
  LabeledGraph with_id(std::string id) const;

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.id_ == b.id_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

  /// Equality ignoring the identifier.
  bool same_content(const LabeledGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::string id_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<NodeId> adjacency_;
};

enum class FlipKind : std::uint8_t { Add, Remove };

const char* to_string(FlipKind kind) noexcept;

/// Toggle of a single node pair. `weight` is only consulted for additions;
/// when absent the graph's mean edge weight is used.
struct EdgeFlip {
  NodeId u = 0;
  NodeId v = 0;
  FlipKind kind = FlipKind::Add;
  std::optional<double> weight;

  static EdgeFlip toggle(const LabeledGraph& g, NodeId a, NodeId b);

  bool same_pair(const EdgeFlip& other) const noexcept {
    return u == other.u && v == other.v;
  }
  friend bool operator==(const EdgeFlip&, const EdgeFlip&) = default;
};

/// Applies the flips in order and returns the perturbed graph. Throws
/// ErrorCode::InapplicableFlip on an add of an existing edge or a removal of
/// a missing one.
LabeledGraph apply_flips(const LabeledGraph& g, std::span<const EdgeFlip> flips);

/// Number of node pairs whose adjacency differs between two graphs over the
/// same node set.
std::size_t edge_symmetric_difference(const LabeledGraph& a, const LabeledGraph& b);

/// Content digest: identical for graphs with equal nodes and edges,
/// regardless of the graph identifier.
struct GraphDigest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const GraphDigest&, const GraphDigest&) = default;
  friend auto operator<=>(const GraphDigest&, const GraphDigest&) = default;
  std::string hex() const;
};

GraphDigest graph_hash(const LabeledGraph& g);

struct GraphDigestHash {
  std::size_t operator()(const GraphDigest& d) const noexcept {
    return static_cast<std::size_t>(d.lo ^ (d.hi * 0x9e3779b97f4a7c15ULL));
  }
};

enum class Split : std::uint8_t { Train, Test };

const char* to_string(Split split) noexcept;

/// Loop (+1) or non-loop (-1) class of a whole graph.
enum class ClassLabel : int { Loop = 1, NonLoop = -1 };

inline int sign_of(ClassLabel y) noexcept { return static_cast<int>(y); }
ClassLabel class_label_from_int(int value);

class GraphDataset {
 public:
  GraphDataset() = default;
  GraphDataset(std::vector<LabeledGraph> graphs, std::vector<ClassLabel> labels,
               std::vector<Split> splits);

  std::size_t size() const noexcept { return graphs_.size(); }
  const std::vector<LabeledGraph>& graphs() const noexcept { return graphs_; }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }
  const std::vector<Split>& splits() const noexcept { return splits_; }
  /// Sorted node-label alphabet.
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

  const LabeledGraph& graph(std::size_t i) const { return graphs_.at(i); }
  ClassLabel label(std::size_t i) const { return labels_.at(i); }
  Split split(std::size_t i) const { return splits_.at(i); }

  /// Subset with the given split tag, order preserved.
  GraphDataset subset(Split which) const;

  friend bool operator==(const GraphDataset&, const GraphDataset&) = default;

 private:
  std::vector<LabeledGraph> graphs_;
  std::vector<ClassLabel> labels_;
  std::vector<Split> splits_;
  std::vector<std::string> vocabulary_;
};

}  // namespace advlcd
