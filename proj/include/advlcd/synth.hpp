#pragma once

#include <cstddef>
#include <cstdint>

#include "advlcd/graph.hpp"
#include "json.hpp"

namespace advlcd {

/// Two-tier scene graphs: object nodes carry semantic labels and anchor a
/// star of feature nodes; objects interconnect at random. Class A (+1, loop)
/// uses the base probabilities; class B (-1) shifts them by `delta`.
struct GeneratorConfig {
  std::size_t graphs_per_class = 150;
  std::size_t test_per_class = 50;
  std::size_t objects_min = 4;
  std::size_t objects_max = 5;
  std::size_t features_min = 5;
  std::size_t features_max = 6;
  std::size_t object_vocabulary = 6;
  std::size_t feature_vocabulary = 1;
  double p_object = 0.2;    ///< object-object edge probability (class A)
  double p_feature = 0.0;   ///< edge probability between features of one object (class A)
  double object_weight_min = 1.0;
  double object_weight_max = 3.0;
  double feature_weight_min = 0.1;
  double feature_weight_max = 1.0;
  double delta = 0.55;       ///< separability: 0 makes the classes identical
  double label_shift = 1.15;   ///< object-label tilt per unit of delta (tilt capped at 1)
  double feature_shift = 0.0;  ///< share of delta added to p_feature for class B
  std::uint64_t seed = 42;

  void validate() const;
  /// Class B probabilities actually used.
  double p_object_b() const;
  double p_feature_b() const;

  nlohmann::ordered_json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& doc);
};

/// Deterministic in cfg.seed; each graph draws from its own substream so the
/// output does not depend on evaluation order. Throws InvalidConfig.
GraphDataset generate(const GeneratorConfig& cfg);

}  // namespace advlcd
