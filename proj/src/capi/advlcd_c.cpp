#include "advlcd/advlcd.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "advlcd/attack.hpp"
#include "advlcd/bench.hpp"
#include "advlcd/dataset_io.hpp"
#include "advlcd/error.hpp"
#include "advlcd/rng.hpp"
#include "advlcd/stats.hpp"
#include "advlcd/synth.hpp"
#include "advlcd/target.hpp"
#include "json.hpp"

struct advlcd_dataset {
  advlcd::GraphDataset ds;
};

struct advlcd_target {
  std::shared_ptr<const advlcd::TargetModel> model;
};

namespace {

thread_local std::string g_last_error;

int status_of(advlcd::ErrorCode code) {
  using advlcd::ErrorCode;
  switch (code) {
    case ErrorCode::InapplicableFlip: return ADVLCD_ERR_INAPPLICABLE_FLIP;
    case ErrorCode::ParseError: return ADVLCD_ERR_PARSE;
    case ErrorCode::SchemaError: return ADVLCD_ERR_SCHEMA;
    case ErrorCode::IoError: return ADVLCD_ERR_IO;
    case ErrorCode::DidNotConverge: return ADVLCD_ERR_DID_NOT_CONVERGE;
    case ErrorCode::BudgetExceedsPairs: return ADVLCD_ERR_BUDGET_EXCEEDS_PAIRS;
    case ErrorCode::NoConnectedPair: return ADVLCD_ERR_NO_CONNECTED_PAIR;
    case ErrorCode::DimensionMismatch: return ADVLCD_ERR_DIMENSION_MISMATCH;
    case ErrorCode::DegenerateData: return ADVLCD_ERR_DEGENERATE_DATA;
    case ErrorCode::DegenerateLabels: return ADVLCD_ERR_DEGENERATE_LABELS;
    case ErrorCode::QueryBudgetExhausted: return ADVLCD_ERR_QUERY_BUDGET_EXHAUSTED;
    case ErrorCode::InvalidConfig: return ADVLCD_ERR_INVALID_CONFIG;
    case ErrorCode::TooFewBlocks: return ADVLCD_ERR_TOO_FEW_BLOCKS;
  }
  return ADVLCD_ERR_INTERNAL;
}

int set_error(int status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return ADVLCD_OK;
  } catch (const advlcd::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return set_error(ADVLCD_ERR_INVALID_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(ADVLCD_ERR_INVALID_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ADVLCD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ADVLCD_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw advlcd::Error(advlcd::ErrorCode::InvalidConfig, message);
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

nlohmann::json parse_or_empty(const char* json) {
  if (json == nullptr || *json == '\0') return nlohmann::json::object();
  return nlohmann::json::parse(json);
}

nlohmann::ordered_json metrics_json(const advlcd::TargetMetrics& m) {
  nlohmann::ordered_json doc;
  doc["train_accuracy"] = m.train_accuracy;
  doc["test_accuracy"] = m.test_accuracy;
  doc["train_size"] = m.train_size;
  doc["test_size"] = m.test_size;
  doc["support_vectors"] = m.support_vectors;
  return doc;
}

}  // namespace

#define ADVLCD_REQUIRE_ARG(cond)                                                  \
  do {                                                                            \
    if (!(cond)) return set_error(ADVLCD_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

extern "C" {

const char* advlcd_version(void) { return "1.0.0"; }

const char* advlcd_last_error(void) { return g_last_error.c_str(); }

const char* advlcd_status_name(int status) {
  switch (status) {
    case ADVLCD_OK: return "ok";
    case ADVLCD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ADVLCD_ERR_INVALID_CONFIG: return "invalid_config";
    case ADVLCD_ERR_PARSE: return "parse_error";
    case ADVLCD_ERR_SCHEMA: return "schema_error";
    case ADVLCD_ERR_IO: return "io_error";
    case ADVLCD_ERR_INAPPLICABLE_FLIP: return "inapplicable_flip";
    case ADVLCD_ERR_DID_NOT_CONVERGE: return "did_not_converge";
    case ADVLCD_ERR_BUDGET_EXCEEDS_PAIRS: return "budget_exceeds_pairs";
    case ADVLCD_ERR_NO_CONNECTED_PAIR: return "no_connected_pair";
    case ADVLCD_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case ADVLCD_ERR_DEGENERATE_DATA: return "degenerate_data";
    case ADVLCD_ERR_DEGENERATE_LABELS: return "degenerate_labels";
    case ADVLCD_ERR_QUERY_BUDGET_EXHAUSTED: return "query_budget_exhausted";
    case ADVLCD_ERR_TOO_FEW_BLOCKS: return "too_few_blocks";
    case ADVLCD_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

void advlcd_string_free(char* text) { std::free(text); }

int advlcd_config_echo(const char* kind, const char* json, char** canonical_json) {
  ADVLCD_REQUIRE_ARG(kind);
  ADVLCD_REQUIRE_ARG(canonical_json);
  return guarded([&] {
    const std::string k(kind);
    const auto doc = parse_or_empty(json);
    std::string out;
    if (k == "generator") out = advlcd::GeneratorConfig::from_json(doc).to_json().dump();
    else if (k == "target") out = advlcd::target_options_to_json(advlcd::target_options_from_json(doc)).dump();
    else if (k == "attack") out = advlcd::AttackConfig::from_json(doc).to_json().dump();
    else if (k == "bench") out = advlcd::BenchSpec::from_json(doc).to_json().dump();
    else require(false, "unknown config kind");
    *canonical_json = copy_string(out);
  });
}

int advlcd_hash_text(const char* text, char** hex) {
  ADVLCD_REQUIRE_ARG(text);
  ADVLCD_REQUIRE_ARG(hex);
  return guarded([&] {
    const std::uint64_t h = advlcd::hash_string(text);
    *hex = copy_string(advlcd::GraphDigest{h, advlcd::mix_seed(h, 1)}.hex());
  });
}

int advlcd_generate(const char* generator_json, advlcd_dataset** out) {
  ADVLCD_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    const auto cfg = advlcd::GeneratorConfig::from_json(parse_or_empty(generator_json));
    *out = new advlcd_dataset{advlcd::generate(cfg)};
  });
}

int advlcd_dataset_read(const char* path, advlcd_dataset** out) {
  ADVLCD_REQUIRE_ARG(path);
  ADVLCD_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] { *out = new advlcd_dataset{advlcd::read_dataset(path)}; });
}

int advlcd_dataset_write(const advlcd_dataset* ds, const char* path) {
  ADVLCD_REQUIRE_ARG(ds);
  ADVLCD_REQUIRE_ARG(path);
  return guarded([&] { advlcd::write_dataset(ds->ds, path); });
}

int advlcd_dataset_counts(const advlcd_dataset* ds, size_t* total, size_t* train, size_t* test) {
  ADVLCD_REQUIRE_ARG(ds);
  return guarded([&] {
    if (total) *total = ds->ds.size();
    if (train) *train = ds->ds.subset(advlcd::Split::Train).size();
    if (test) *test = ds->ds.subset(advlcd::Split::Test).size();
  });
}

void advlcd_dataset_free(advlcd_dataset* ds) { delete ds; }

int advlcd_target_train(const advlcd_dataset* ds, const char* options_json, advlcd_target** out,
                        char** metrics) {
  ADVLCD_REQUIRE_ARG(ds);
  ADVLCD_REQUIRE_ARG(out);
  *out = nullptr;
  if (metrics) *metrics = nullptr;
  return guarded([&] {
    const auto options = advlcd::target_options_from_json(parse_or_empty(options_json));
    auto trained = advlcd::train_target(ds->ds, options);
    auto handle = std::make_unique<advlcd_target>(advlcd_target{std::move(trained.model)});
    if (metrics) *metrics = copy_string(metrics_json(trained.metrics).dump());
    *out = handle.release();
  });
}

int advlcd_target_save(const advlcd_target* target, const char* path) {
  ADVLCD_REQUIRE_ARG(target);
  ADVLCD_REQUIRE_ARG(path);
  return guarded([&] { advlcd::save_target(*target->model, path); });
}

int advlcd_target_load(const char* path, advlcd_target** out) {
  ADVLCD_REQUIRE_ARG(path);
  ADVLCD_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new advlcd_target{std::make_shared<const advlcd::TargetModel>(advlcd::load_target(path))};
  });
}

int advlcd_target_evaluate(const advlcd_target* target, const advlcd_dataset* ds,
                           char** metrics) {
  ADVLCD_REQUIRE_ARG(target);
  ADVLCD_REQUIRE_ARG(ds);
  ADVLCD_REQUIRE_ARG(metrics);
  *metrics = nullptr;
  return guarded([&] {
    advlcd::TargetMetrics m;
    for (const auto split : {advlcd::Split::Train, advlcd::Split::Test}) {
      const auto part = ds->ds.subset(split);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < part.size(); ++i) {
        correct += target->model->predict(part.graph(i)).label == part.label(i) ? 1 : 0;
      }
      const double acc = part.size() ? static_cast<double>(correct) / static_cast<double>(part.size()) : 0.0;
      if (split == advlcd::Split::Train) {
        m.train_accuracy = acc;
        m.train_size = part.size();
      } else {
        m.test_accuracy = acc;
        m.test_size = part.size();
      }
    }
    m.support_vectors = target->model->svm().support_vectors.size();
    *metrics = copy_string(metrics_json(m).dump());
  });
}

void advlcd_target_free(advlcd_target* target) { delete target; }

int advlcd_attack(const advlcd_target* target, const advlcd_dataset* ds, const char* attack_json,
                  const char* oracle_mode, size_t workers, int include_records,
                  char** summary_json) {
  ADVLCD_REQUIRE_ARG(target);
  ADVLCD_REQUIRE_ARG(ds);
  ADVLCD_REQUIRE_ARG(summary_json);
  *summary_json = nullptr;
  return guarded([&] {
    const auto cfg = advlcd::AttackConfig::from_json(parse_or_empty(attack_json));
    const auto mode = oracle_mode ? advlcd::parse_oracle_mode(oracle_mode) : advlcd::OracleMode::Score;
    auto test = ds->ds.subset(advlcd::Split::Test);
    if (test.size() == 0) test = ds->ds;
    const advlcd::TargetModelService service(target->model, mode);
    const auto summary = advlcd::attack_testset(service, test, cfg, workers == 0 ? 1 : workers);
    auto doc = summary.to_json(include_records != 0);
    doc["oracle"] = advlcd::to_string(mode);
    *summary_json = copy_string(doc.dump(2));
  });
}

int advlcd_bench(const char* spec_json, size_t workers, const char* out_dir, char** result_json) {
  ADVLCD_REQUIRE_ARG(spec_json);
  ADVLCD_REQUIRE_ARG(out_dir);
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    const auto spec = advlcd::BenchSpec::from_json(nlohmann::json::parse(spec_json));
    const auto result = advlcd::run_benchmark(spec, workers == 0 ? 1 : workers);
    advlcd::write_bench_outputs(spec, result, out_dir);
    if (!result_json) return;
    nlohmann::ordered_json doc;
    doc["out_dir"] = out_dir;
    doc["audit_violations"] = result.audit.violation_count;
    auto& exps = doc["experiments"] = nlohmann::ordered_json::array();
    for (const auto& er : result.experiments) {
      nlohmann::ordered_json e;
      e["name"] = er.spec.name;
      e["methods"] = er.spec.methods;
      e["r_values"] = er.spec.r_values;
      e["means"] = er.means;
      if (er.rank) e["rank"] = er.rank->to_json();
      exps.push_back(std::move(e));
    }
    *result_json = copy_string(doc.dump(2));
  });
}

int advlcd_rank(const char* table_csv_path, double alpha, const char* out_dir, char** report_json,
                char** cd_text) {
  ADVLCD_REQUIRE_ARG(table_csv_path);
  if (report_json) *report_json = nullptr;
  if (cd_text) *cd_text = nullptr;
  return guarded([&] {
    std::ifstream in(table_csv_path);
    if (!in) throw advlcd::Error(advlcd::ErrorCode::IoError, std::string("cannot open ") + table_csv_path);
    const auto table = advlcd::read_table_csv(in);
    const auto report = advlcd::friedman_nemenyi(table, alpha);
    const std::string json = report.to_json().dump(2) + "\n";
    const std::string cd = advlcd::cd_diagram(report);
    if (out_dir && *out_dir) {
      namespace fs = std::filesystem;
      fs::create_directories(out_dir);
      auto write = [&](const char* name, const std::string& text) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        if (!f) throw advlcd::Error(advlcd::ErrorCode::IoError, std::string("cannot write ") + name);
        f << text;
      };
      write("rank.json", json);
      std::ostringstream csv;
      advlcd::write_rank_csv(report, csv);
      write("rank.csv", csv.str());
      write("cd.txt", cd);
    }
    if (report_json) *report_json = copy_string(json);
    if (cd_text) *cd_text = copy_string(cd);
  });
}

}  // extern "C"
