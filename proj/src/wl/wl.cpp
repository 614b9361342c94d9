#include "advlcd/wl.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "advlcd/error.hpp"
#include "advlcd/parallel.hpp"

namespace advlcd {

LabelId LabelDictionary::intern(std::string_view key) {
  auto it = ids_.find(std::string(key));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<LabelId>(keys_.size());
  keys_.emplace_back(key);
  ids_.emplace(keys_.back(), id);
  return id;
}

std::optional<LabelId> LabelDictionary::find(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LabelDictionary LabelDictionary::from_keys(std::vector<std::string> keys) {
  LabelDictionary dict;
  for (auto& k : keys) {
    if (dict.find(k)) fail(ErrorCode::SchemaError, "dictionary: duplicate key \"" + k + "\"");
    dict.intern(k);
  }
  return dict;
}

LabelId DictionaryOverlay::intern(std::string_view key) {
  if (auto id = base_.find(key)) return *id;
  std::string k(key);
  auto it = local_.find(k);
  if (it != local_.end()) return it->second;
  const auto id = static_cast<LabelId>(base_.size() + local_.size());
  local_.emplace(std::move(k), id);
  return id;
}

namespace {

std::string initial_key(const Node& node) { return "0:" + node.label; }

std::string refined_key(const LabeledGraph& g, const std::vector<LabelId>& labels, NodeId v,
                        std::size_t iteration, std::vector<LabelId>& scratch) {
  scratch.clear();
  for (NodeId u : g.neighbors(v)) scratch.push_back(labels[u]);
  std::sort(scratch.begin(), scratch.end());
  std::string key = std::to_string(iteration);
  key += ':';
  key += std::to_string(labels[v]);
  key += '|';
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(scratch[i]);
  }
  return key;
}

void add_histogram(std::map<LabelId, std::pair<std::uint32_t, std::uint32_t>>& hist,
                   const std::vector<LabelId>& labels, std::uint32_t iteration) {
  for (LabelId id : labels) {
    auto& slot = hist[id];
    slot.first = iteration;
    ++slot.second;
  }
}

WlFeatureVector finish(const std::map<LabelId, std::pair<std::uint32_t, std::uint32_t>>& hist,
                       std::size_t iterations) {
  WlFeatureVector out;
  out.iterations = iterations;
  out.entries.reserve(hist.size());
  for (const auto& [id, slot] : hist) out.entries.push_back({slot.first, id, slot.second});
  return out;
}

}  // namespace

std::vector<LabelId> wl_initial_labels(const LabeledGraph& g, LabelSink& dict) {
  std::vector<LabelId> labels(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) labels[v] = dict.intern(initial_key(g.nodes()[v]));
  return labels;
}

std::vector<LabelId> wl_relabel_step(const LabeledGraph& g, const std::vector<LabelId>& labels,
                                     std::size_t iteration, LabelSink& dict) {
  std::vector<LabelId> next(g.node_count());
  std::vector<LabelId> scratch;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    next[v] = dict.intern(refined_key(g, labels, v, iteration, scratch));
  }
  return next;
}

SparseVector WlFeatureVector::to_sparse() const {
  SparseVector out;
  out.index.reserve(entries.size());
  out.value.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label, static_cast<double>(e.count));
  return out;
}

std::vector<std::size_t> WlFeatureVector::counts_per_iteration() const {
  std::vector<std::size_t> sums(iterations + 1, 0);
  for (const auto& e : entries) sums.at(e.iteration) += e.count;
  return sums;
}

WlFeatureVector wl_feature_vector(const LabeledGraph& g, std::size_t iterations,
                                  LabelSink& dict) {
  std::map<LabelId, std::pair<std::uint32_t, std::uint32_t>> hist;
  auto labels = wl_initial_labels(g, dict);
  add_histogram(hist, labels, 0);
  for (std::size_t h = 1; h <= iterations; ++h) {
    labels = wl_relabel_step(g, labels, h, dict);
    add_histogram(hist, labels, static_cast<std::uint32_t>(h));
  }
  return finish(hist, iterations);
}

std::vector<WlFeatureVector> wl_feature_vectors(const std::vector<LabeledGraph>& graphs,
                                                std::size_t iterations, LabelDictionary& dict,
                                                std::size_t workers) {
  const std::size_t count = graphs.size();
  std::vector<std::map<LabelId, std::pair<std::uint32_t, std::uint32_t>>> hists(count);
  std::vector<std::vector<LabelId>> labels(count);
  std::vector<std::vector<std::string>> keys(count);
  for (std::size_t h = 0; h <= iterations; ++h) {
    // Phase 1: signatures from the previous iteration's ids.
    parallel_for(count, workers, [&](std::size_t i) {
      const auto& g = graphs[i];
      keys[i].resize(g.node_count());
      std::vector<LabelId> scratch;
      for (NodeId v = 0; v < g.node_count(); ++v) {
        keys[i][v] = h == 0 ? initial_key(g.nodes()[v])
                            : refined_key(g, labels[i], v, h, scratch);
      }
    });
    // Phase 2: deterministic id assignment in graph order.
    for (std::size_t i = 0; i < count; ++i) {
      labels[i].resize(keys[i].size());
      for (std::size_t v = 0; v < keys[i].size(); ++v) labels[i][v] = dict.intern(keys[i][v]);
    }
    parallel_for(count, workers, [&](std::size_t i) {
      add_histogram(hists[i], labels[i], static_cast<std::uint32_t>(h));
    });
  }
  std::vector<WlFeatureVector> out;
  out.reserve(count);
  for (const auto& hist : hists) out.push_back(finish(hist, iterations));
  return out;
}

DenseMatrix wl_kernel_matrix(const std::vector<LabeledGraph>& graphs, std::size_t iterations,
                             bool normalize) {
  LabelDictionary dict;
  const auto phis = wl_feature_vectors(graphs, iterations, dict);
  std::vector<SparseVector> vecs;
  vecs.reserve(phis.size());
  for (const auto& phi : phis) vecs.push_back(phi.to_sparse());

  const std::size_t n = graphs.size();
  DenseMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      k(i, j) = k(j, i) = dot(vecs[i], vecs[j]);
    }
  }
  if (normalize) {
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = k(i, i);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k(i, j) = i == j ? 1.0 : k(i, j) / std::sqrt(diag[i] * diag[j]);
      }
    }
  }
  return k;
}

}  // namespace advlcd
