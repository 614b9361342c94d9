#include "advlcd/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>

#include "advlcd/error.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InapplicableFlip: return "InapplicableFlip";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::BudgetExceedsPairs: return "BudgetExceedsPairs";
    case ErrorCode::NoConnectedPair: return "NoConnectedPair";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::QueryBudgetExhausted: return "QueryBudgetExhausted";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooFewBlocks: return "TooFewBlocks";
  }
  return "Unknown";
}

const char* to_string(Tier tier) noexcept {
  return tier == Tier::Object ? "object" : "feature";
}

Tier parse_tier(const std::string& text) {
  if (text == "object") return Tier::Object;
  if (text == "feature") return Tier::Feature;
  fail(ErrorCode::SchemaError, "tier: expected \"object\" or \"feature\", got \"" + text + "\"");
}

const char* to_string(FlipKind kind) noexcept {
  return kind == FlipKind::Add ? "add" : "remove";
}

const char* to_string(Split split) noexcept {
  return split == Split::Train ? "train" : "test";
}

ClassLabel class_label_from_int(int value) {
  if (value == 1) return ClassLabel::Loop;
  if (value == -1) return ClassLabel::NonLoop;
  fail(ErrorCode::SchemaError, "y: expected +1 or -1, got " + std::to_string(value));
}

LabeledGraph::LabeledGraph(std::string id, std::vector<Node> nodes, std::vector<Edge> edges)
    : id_(std::move(id)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const std::size_t n = nodes_.size();
  if (n == 0) fail(ErrorCode::SchemaError, "graph " + id_ + ": nodes must be non-empty");
  for (auto& e : edges_) {
    if (e.u == e.v) {
      fail(ErrorCode::SchemaError,
           "graph " + id_ + ": self-loop on node " + std::to_string(e.u));
    }
    if (e.u >= n || e.v >= n) {
      fail(ErrorCode::SchemaError, "graph " + id_ + ": edge endpoint out of range (" +
                                       std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      fail(ErrorCode::SchemaError, "graph " + id_ + ": edge weight must be finite and >= 0");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      fail(ErrorCode::SchemaError, "graph " + id_ + ": duplicate edge (" +
                                       std::to_string(edges_[i].u) + "," +
                                       std::to_string(edges_[i].v) + ")");
    }
  }

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  adjacency_offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) adjacency_offsets_[v + 1] = adjacency_offsets_[v] + degree[v];
  adjacency_.resize(adjacency_offsets_[n]);
  std::vector<std::size_t> cursor(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[cursor[e.u]++] = e.v;
    adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[v + 1]));
  }
}

std::span<const NodeId> LabeledGraph::neighbors(NodeId v) const {
  if (v >= nodes_.size()) fail(ErrorCode::InvalidConfig, "node index out of range");
  return {adjacency_.data() + adjacency_offsets_[v],
          adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
}

bool LabeledGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= nodes_.size() || v >= nodes_.size() || u == v) return false;
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<double> LabeledGraph::edge_weight(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v, 0.0},
                             [](const Edge& a, const Edge& b) {
                               return a.u != b.u ? a.u < b.u : a.v < b.v;
                             });
  if (it == edges_.end() || it->u != u || it->v != v) return std::nullopt;
  return it->weight;
}

double LabeledGraph::mean_edge_weight() const noexcept {
  if (edges_.empty()) return 1.0;
  double total = 0.0;
  for (const auto& e : edges_) total += e.weight;
  return total / static_cast<double>(edges_.size());
}

LabeledGraph LabeledGraph::with_id(std::string id) const {
  LabeledGraph copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

EdgeFlip EdgeFlip::toggle(const LabeledGraph& g, NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return EdgeFlip{a, b, g.has_edge(a, b) ? FlipKind::Remove : FlipKind::Add, std::nullopt};
}

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return a.u != b.u ? a.u < b.u : a.v < b.v;
}

}  // namespace

LabeledGraph apply_flips(const LabeledGraph& g, std::span<const EdgeFlip> flips) {
  if (flips.empty()) return g;
  const double add_weight = g.mean_edge_weight();
  std::vector<Edge> edges = g.edges();
  for (const auto& flip : flips) {
    NodeId u = flip.u;
    NodeId v = flip.v;
    if (u > v) std::swap(u, v);
    if (u == v || v >= g.node_count()) {
      fail(ErrorCode::InapplicableFlip,
           "flip (" + std::to_string(u) + "," + std::to_string(v) + ") is not a valid node pair");
    }
    const Edge probe{u, v, 0.0};
    auto it = std::lower_bound(edges.begin(), edges.end(), probe, edge_less);
    const bool present = it != edges.end() && it->u == u && it->v == v;
    if (flip.kind == FlipKind::Add) {
      if (present) {
        fail(ErrorCode::InapplicableFlip,
             "add(" + std::to_string(u) + "," + std::to_string(v) + ") on existing edge");
      }
      edges.insert(it, Edge{u, v, flip.weight.value_or(add_weight)});
    } else {
      if (!present) {
        fail(ErrorCode::InapplicableFlip,
             "remove(" + std::to_string(u) + "," + std::to_string(v) + ") on missing edge");
      }
      edges.erase(it);
    }
  }
  return LabeledGraph(g.id(), g.nodes(), std::move(edges));
}

std::size_t edge_symmetric_difference(const LabeledGraph& a, const LabeledGraph& b) {
  const auto& ea = a.edges();
  const auto& eb = b.edges();
  std::size_t i = 0, j = 0, diff = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && edge_less(ea[i], eb[j]))) {
      ++diff;
      ++i;
    } else if (i == ea.size() || edge_less(eb[j], ea[i])) {
      ++diff;
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return diff;
}

std::string GraphDigest::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

namespace {

struct DigestBuilder {
  std::uint64_t a = 0x243f6a8885a308d3ULL;
  std::uint64_t b = 0x13198a2e03707344ULL;

  void add(std::uint64_t x) {
    a = splitmix64(a ^ x);
    b = splitmix64(b + x * 0xff51afd7ed558ccdULL + 0x9e3779b97f4a7c15ULL);
  }
  void add(const std::string& s) {
    add(s.size());
    add(hash_string(s));
  }
};

}  // namespace

GraphDigest graph_hash(const LabeledGraph& g) {
  DigestBuilder d;
  d.add(g.node_count());
  for (const auto& node : g.nodes()) {
    d.add(node.label);
    d.add(static_cast<std::uint64_t>(node.tier));
  }
  d.add(g.edge_count());
  for (const auto& e : g.edges()) {
    d.add((static_cast<std::uint64_t>(e.u) << 32) | e.v);
    d.add(std::bit_cast<std::uint64_t>(e.weight));
  }
  return GraphDigest{d.a, d.b};
}

GraphDataset::GraphDataset(std::vector<LabeledGraph> graphs, std::vector<ClassLabel> labels,
                           std::vector<Split> splits)
    : graphs_(std::move(graphs)), labels_(std::move(labels)), splits_(std::move(splits)) {
  if (graphs_.size() != labels_.size() || graphs_.size() != splits_.size()) {
    fail(ErrorCode::SchemaError, "dataset: graphs, labels and splits differ in length");
  }
  std::set<std::string> vocab;
  for (const auto& g : graphs_) {
    for (const auto& node : g.nodes()) vocab.insert(node.label);
  }
  vocabulary_.assign(vocab.begin(), vocab.end());
}

GraphDataset GraphDataset::subset(Split which) const {
  std::vector<LabeledGraph> graphs;
  std::vector<ClassLabel> labels;
  std::vector<Split> splits;
  for (std::size_t i = 0; i < size(); ++i) {
    if (splits_[i] != which) continue;
    graphs.push_back(graphs_[i]);
    labels.push_back(labels_[i]);
    splits.push_back(which);
  }
  return GraphDataset(std::move(graphs), std::move(labels), std::move(splits));
}

}  // namespace advlcd
