#pragma once

#include <string>
#include <string_view>

#include "advlcd/learners.hpp"
#include "json.hpp"

namespace advlcd {

inline constexpr const char* kSvmFormat = "svm-v1";

/// {"format": "svm-v1", "kernel": {...}, "C": ..., "bias": ..., "platt_a": ...,
///  "platt_b": ..., "support_vectors": [{"alpha", "y", "index", "value"}]}
/// C = +infinity is written as null. Doubles round-trip exactly.
nlohmann::ordered_json svm_to_json(const TrainedSvm& model);
TrainedSvm svm_from_json(const nlohmann::json& doc);

std::string svm_to_string(const TrainedSvm& model);
TrainedSvm svm_from_string(std::string_view text);

}  // namespace advlcd
