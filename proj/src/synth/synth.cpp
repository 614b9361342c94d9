#include "advlcd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "advlcd/error.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

namespace {

const char* const kObjectNames[] = {"chair", "desk", "monitor", "keyboard", "cup", "book",
                                    "lamp", "plant", "bottle", "laptop", "phone", "clock"};

std::string object_name(std::size_t i) {
  constexpr std::size_t kNamed = sizeof(kObjectNames) / sizeof(kObjectNames[0]);
  if (i < kNamed) return kObjectNames[i];
  return "object" + std::to_string(i);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::InvalidConfig, std::string(name) + " must be a probability in [0,1]");
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  if (graphs_per_class == 0) fail(ErrorCode::InvalidConfig, "graphs_per_class must be >= 1");
  if (test_per_class > graphs_per_class) {
    fail(ErrorCode::InvalidConfig, "test_per_class exceeds graphs_per_class");
  }
  if (objects_min == 0 || objects_min > objects_max) {
    fail(ErrorCode::InvalidConfig, "object range must be non-empty with objects_min >= 1");
  }
  if (features_min > features_max) fail(ErrorCode::InvalidConfig, "feature range is empty");
  if (object_vocabulary == 0) fail(ErrorCode::InvalidConfig, "object_vocabulary must be >= 1");
  if (feature_vocabulary == 0) fail(ErrorCode::InvalidConfig, "feature_vocabulary must be >= 1");
  check_probability(p_object, "p_object");
  check_probability(p_feature, "p_feature");
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::InvalidConfig, "delta must be >= 0");
  if (!(label_shift >= 0.0) || !std::isfinite(label_shift)) {
    fail(ErrorCode::InvalidConfig, "label_shift must be >= 0");
  }
  check_probability(feature_shift, "feature_shift");
  if (!(object_weight_min >= 0.0 && object_weight_min <= object_weight_max) ||
      !(feature_weight_min >= 0.0 && feature_weight_min <= feature_weight_max)) {
    fail(ErrorCode::InvalidConfig, "weight ranges must be non-empty and non-negative");
  }
}

double GeneratorConfig::p_object_b() const { return std::min(1.0, p_object + delta); }
double GeneratorConfig::p_feature_b() const {
  return std::min(1.0, p_feature + feature_shift * delta);
}

nlohmann::ordered_json GeneratorConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["graphs_per_class"] = graphs_per_class;
  doc["test_per_class"] = test_per_class;
  doc["objects_min"] = objects_min;
  doc["objects_max"] = objects_max;
  doc["features_min"] = features_min;
  doc["features_max"] = features_max;
  doc["object_vocabulary"] = object_vocabulary;
  doc["feature_vocabulary"] = feature_vocabulary;
  doc["p_object"] = p_object;
  doc["p_feature"] = p_feature;
  doc["object_weight_min"] = object_weight_min;
  doc["object_weight_max"] = object_weight_max;
  doc["feature_weight_min"] = feature_weight_min;
  doc["feature_weight_max"] = feature_weight_max;
  doc["delta"] = delta;
  doc["label_shift"] = label_shift;
  doc["feature_shift"] = feature_shift;
  doc["seed"] = seed;
  return doc;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "generator config must be a JSON object");
  GeneratorConfig cfg;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "graphs_per_class") cfg.graphs_per_class = v.get<std::size_t>();
      else if (k == "test_per_class") cfg.test_per_class = v.get<std::size_t>();
      else if (k == "objects_min") cfg.objects_min = v.get<std::size_t>();
      else if (k == "objects_max") cfg.objects_max = v.get<std::size_t>();
      else if (k == "features_min") cfg.features_min = v.get<std::size_t>();
      else if (k == "features_max") cfg.features_max = v.get<std::size_t>();
      else if (k == "object_vocabulary") cfg.object_vocabulary = v.get<std::size_t>();
      else if (k == "feature_vocabulary") cfg.feature_vocabulary = v.get<std::size_t>();
      else if (k == "p_object") cfg.p_object = v.get<double>();
      else if (k == "p_feature") cfg.p_feature = v.get<double>();
      else if (k == "object_weight_min") cfg.object_weight_min = v.get<double>();
      else if (k == "object_weight_max") cfg.object_weight_max = v.get<double>();
      else if (k == "feature_weight_min") cfg.feature_weight_min = v.get<double>();
      else if (k == "feature_weight_max") cfg.feature_weight_max = v.get<double>();
      else if (k == "delta") cfg.delta = v.get<double>();
      else if (k == "label_shift") cfg.label_shift = v.get<double>();
      else if (k == "feature_shift") cfg.feature_shift = v.get<double>();
      else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else fail(ErrorCode::InvalidConfig, "generator config: unknown key \"" + k + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("generator config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

LabeledGraph generate_graph(const GeneratorConfig& cfg, bool class_b, std::size_t index) {
  Rng rng = substream(cfg.seed, index);
  auto uniform_count = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform_real = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  // Class B tilts the object-label distribution towards the lower half of
  // the vocabulary.
  const std::size_t vocab = cfg.object_vocabulary;
  std::vector<double> label_weights(vocab, 1.0);
  if (class_b) {
    const double tilt = std::min(1.0, cfg.delta * cfg.label_shift);
    for (std::size_t j = 0; j < vocab; ++j) {
      label_weights[j] = j < (vocab + 1) / 2 ? 1.0 + tilt : 1.0 - 0.999 * tilt;
    }
  }
  std::discrete_distribution<std::size_t> object_label(label_weights.begin(), label_weights.end());

  const double p_obj = class_b ? cfg.p_object_b() : cfg.p_object;
  const double p_feat = class_b ? cfg.p_feature_b() : cfg.p_feature;

  const std::size_t objects = uniform_count(cfg.objects_min, cfg.objects_max);
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (std::size_t o = 0; o < objects; ++o) {
    nodes.push_back(Node{object_name(object_label(rng)), Tier::Object});
  }
  for (NodeId a = 0; a < objects; ++a) {
    for (NodeId b = a + 1; b < objects; ++b) {
      if (unit(rng) < p_obj) {
        edges.push_back(Edge{a, b, uniform_real(cfg.object_weight_min, cfg.object_weight_max)});
      }
    }
  }
  for (NodeId o = 0; o < objects; ++o) {
    const std::size_t count = uniform_count(cfg.features_min, cfg.features_max);
    const auto first = static_cast<NodeId>(nodes.size());
    for (std::size_t f = 0; f < count; ++f) {
      const auto id = static_cast<NodeId>(nodes.size());
      nodes.push_back(Node{"orb" + std::to_string(uniform_count(0, cfg.feature_vocabulary - 1)),
                           Tier::Feature});
      edges.push_back(Edge{o, id, uniform_real(cfg.feature_weight_min, cfg.feature_weight_max)});
    }
    const auto last = static_cast<NodeId>(nodes.size());
    for (NodeId a = first; a < last; ++a) {
      for (NodeId b = a + 1; b < last; ++b) {
        if (unit(rng) < p_feat) {
          edges.push_back(Edge{a, b, uniform_real(cfg.feature_weight_min, cfg.feature_weight_max)});
        }
      }
    }
  }

  char id[32];
  std::snprintf(id, sizeof id, "g%04zu", index + 1);
  return LabeledGraph(id, std::move(nodes), std::move(edges));
}

}  // namespace

GraphDataset generate(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t total = 2 * cfg.graphs_per_class;
  std::vector<LabeledGraph> graphs;
  std::vector<ClassLabel> labels;
  std::vector<Split> splits;
  graphs.reserve(total);
  // Classes alternate; the last test_per_class graphs of each class form the
  // test split.
  for (std::size_t i = 0; i < total; ++i) {
    const bool class_b = i % 2 == 1;
    const std::size_t within_class = i / 2;
    graphs.push_back(generate_graph(cfg, class_b, i));
    labels.push_back(class_b ? ClassLabel::NonLoop : ClassLabel::Loop);
    splits.push_back(within_class >= cfg.graphs_per_class - cfg.test_per_class ? Split::Test
                                                                              : Split::Train);
  }
  return GraphDataset(std::move(graphs), std::move(labels), std::move(splits));
}

}  // namespace advlcd
