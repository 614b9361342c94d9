#include "advlcd/model_io.hpp"

#include <cmath>
#include <limits>

#include "advlcd/error.hpp"

namespace advlcd {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json svm_to_json(const TrainedSvm& model) {
  ordered_json doc;
  doc["format"] = kSvmFormat;
  ordered_json kernel;
  kernel["kind"] = to_string(model.kernel.kind);
  kernel["gamma"] = model.kernel.gamma;
  kernel["degree"] = model.kernel.degree;
  kernel["coef0"] = model.kernel.coef0;
  doc["kernel"] = std::move(kernel);
  doc["C"] = std::isfinite(model.C) ? ordered_json(model.C) : ordered_json(nullptr);
  doc["bias"] = model.bias;
  doc["platt_a"] = model.platt_a;
  doc["platt_b"] = model.platt_b;
  ordered_json svs = ordered_json::array();
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    ordered_json sv;
    sv["alpha"] = model.alpha[i];
    sv["y"] = model.labels[i];
    sv["index"] = model.support_vectors[i].index;
    sv["value"] = model.support_vectors[i].value;
    svs.push_back(std::move(sv));
  }
  doc["support_vectors"] = std::move(svs);
  return doc;
}

TrainedSvm svm_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kSvmFormat) {
      fail(ErrorCode::SchemaError, "model: expected format \"svm-v1\"");
    }
    TrainedSvm model;
    const json& kernel = doc.at("kernel");
    model.kernel.kind = parse_kernel_kind(kernel.at("kind").get<std::string>());
    model.kernel.gamma = kernel.at("gamma").get<double>();
    model.kernel.degree = kernel.at("degree").get<int>();
    model.kernel.coef0 = kernel.at("coef0").get<double>();
    model.C = doc.at("C").is_null() ? std::numeric_limits<double>::infinity()
                                    : doc.at("C").get<double>();
    model.bias = doc.at("bias").get<double>();
    model.platt_a = doc.at("platt_a").get<double>();
    model.platt_b = doc.at("platt_b").get<double>();
    for (const json& sv : doc.at("support_vectors")) {
      model.alpha.push_back(sv.at("alpha").get<double>());
      model.labels.push_back(sv.at("y").get<int>());
      SparseVector v;
      v.index = sv.at("index").get<std::vector<std::uint32_t>>();
      v.value = sv.at("value").get<std::vector<double>>();
      if (v.index.size() != v.value.size()) {
        fail(ErrorCode::SchemaError, "model: support vector index/value length mismatch");
      }
      model.support_vectors.push_back(std::move(v));
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("model: ") + e.what());
  }
}

std::string svm_to_string(const TrainedSvm& model) { return svm_to_json(model).dump(); }

TrainedSvm svm_from_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
  return svm_from_json(doc);
}

}  // namespace advlcd
