#include "advlcd/query.hpp"

#include <algorithm>

#include "advlcd/error.hpp"

namespace advlcd {

const char* to_string(OracleMode mode) noexcept {
  return mode == OracleMode::Score ? "score" : "label";
}

OracleMode parse_oracle_mode(const std::string& text) {
  if (text == "score") return OracleMode::Score;
  if (text == "label") return OracleMode::Label;
  fail(ErrorCode::InvalidConfig, "oracle mode must be \"score\" or \"label\", got \"" + text + "\"");
}

double attack_loss(const Observation& observed, ClassLabel y) {
  const double confidence = std::clamp(observed.confidence, 0.0, 1.0);
  const double p_true = observed.label == y ? confidence : 1.0 - confidence;
  return 1.0 - p_true;
}

}  // namespace advlcd
