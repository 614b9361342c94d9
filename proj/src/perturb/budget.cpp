#include <cmath>

#include "advlcd/error.hpp"
#include "advlcd/perturb.hpp"

namespace advlcd {

Budget::Budget(double ratio, std::size_t node_count) : ratio_(ratio), node_count_(node_count) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    fail(ErrorCode::InvalidConfig, "perturbation ratio r must be finite and > 0");
  }
  if (node_count == 0) fail(ErrorCode::InvalidConfig, "budget needs at least one node");
  const double raw = std::ceil(ratio * static_cast<double>(node_count) *
                               static_cast<double>(node_count));
  beta_ = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (pair_count() > 0 && beta_ > pair_count()) beta_ = pair_count();
}

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Eigencentrality: return "eigencentrality";
    case Strategy::RandomWalk: return "random_walk";
    case Strategy::ShortestPath: return "shortest_path";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "eigencentrality") return Strategy::Eigencentrality;
  if (text == "random_walk") return Strategy::RandomWalk;
  if (text == "shortest_path") return Strategy::ShortestPath;
  fail(ErrorCode::InvalidConfig, "unknown strategy \"" + text + "\"");
}

}  // namespace advlcd
