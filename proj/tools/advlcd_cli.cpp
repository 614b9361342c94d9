// advlcd command-line tool. Talks to the library only through advlcd.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "advlcd/advlcd.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Failure {
  int exit_code;
  std::string message;
};

bool is_config_status(int status) {
  return status == ADVLCD_ERR_INVALID_CONFIG || status == ADVLCD_ERR_INVALID_ARGUMENT ||
         status == ADVLCD_ERR_SCHEMA;
}

void check(int status, const std::string& what) {
  if (status == ADVLCD_OK) return;
  throw Failure{is_config_status(status) ? kExitConfig : kExitRuntime,
                what + ": " + advlcd_status_name(status) + ": " + advlcd_last_error()};
}

// Owns a string returned by the C API.
class CString {
 public:
  CString() = default;
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  ~CString() { advlcd_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

 private:
  char* p_ = nullptr;
};

struct DatasetHandle {
  advlcd_dataset* p = nullptr;
  ~DatasetHandle() { advlcd_dataset_free(p); }
};

struct TargetHandle {
  advlcd_target* p = nullptr;
  ~TargetHandle() { advlcd_target_free(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitRuntime, "io_error: cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitRuntime, "io_error: cannot write " + path.string()};
  out << text;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitRuntime, "io_error: cannot create " + dir + ": " + ec.message()};
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Failure{kExitConfig, what + ": invalid JSON: " + e.what()};
  }
}

// Validates `doc` as a config of `kind` and returns it with defaults filled in.
json echo(const char* kind, const json& doc) {
  CString out;
  check(advlcd_config_echo(kind, doc.dump().c_str(), out.out()), std::string(kind) + " config");
  return parse_json(out.str(), kind);
}

std::string hash_of(const std::string& text) {
  CString out;
  check(advlcd_hash_text(text.c_str(), out.out()), "hash");
  return out.str();
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  return parse_json(read_file(path), path);
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out = "advlcd_out";
  bool json_mode = false;
  std::size_t workers = 1;
};

struct AttackFlags {
  std::optional<double> r;
  std::optional<std::string> strategy;
  std::optional<std::string> surrogate;
  std::optional<std::size_t> wl_iterations;
  std::optional<std::size_t> max_queries;
  std::optional<std::size_t> k_candidates;
  std::optional<std::size_t> rounds;
  std::string oracle = "score";
  std::string config;
  bool records = false;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f) {
  cmd->add_option("--r", f.r, "perturbation ratio");
  cmd->add_option("--strategy", f.strategy, "eigencentrality | random_walk | shortest_path");
  cmd->add_option("--surrogate", f.surrogate, "svm_rbf | svm_linear | svm_poly | naive_bayes");
  cmd->add_option("--wl-iters", f.wl_iterations, "WL iterations used by the surrogate");
  cmd->add_option("--max-queries", f.max_queries, "query budget per graph");
  cmd->add_option("--k-candidates", f.k_candidates, "candidates queried per round");
  cmd->add_option("--rounds", f.rounds, "attack rounds");
  cmd->add_option("--oracle", f.oracle, "score | label")->check(CLI::IsMember({"score", "label"}));
  cmd->add_option("--config", f.config, "attack config JSON file (flags override it)");
  cmd->add_flag("--records", f.records, "include every query record in the summary");
}

json attack_config(const AttackFlags& f, const Common& c) {
  json doc = load_config_file(f.config);
  if (f.r) doc["r"] = *f.r;
  if (f.strategy) doc["strategy"] = *f.strategy;
  if (f.surrogate) doc["surrogate"] = *f.surrogate;
  if (f.wl_iterations) doc["wl_iterations"] = *f.wl_iterations;
  if (f.max_queries) doc["max_queries"] = *f.max_queries;
  if (f.k_candidates) doc["k_candidates"] = *f.k_candidates;
  if (f.rounds) doc["rounds"] = *f.rounds;
  if (c.seed) doc["seed"] = *c.seed;
  return echo("attack", doc);
}

void emit(const Common& c, const json& data, const std::string& human) {
  if (c.json_mode) std::cout << data.dump(2) << '\n';
  else std::cerr << human;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box evasion attacks on graph-based loop closure classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(advlcd_version()));

  Common common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "random seed");
    cmd->add_option("--out", common.out, "output directory");
    cmd->add_flag("--json", common.json_mode, "print the result as JSON on stdout");
    cmd->add_option("--workers", common.workers, "worker threads (results do not depend on it)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen);
  std::string gen_config;
  std::optional<double> gen_delta;
  std::optional<std::size_t> gen_per_class;
  gen->add_option("--config", gen_config, "generator config JSON file");
  gen->add_option("--delta", gen_delta, "class separability");
  gen->add_option("--graphs-per-class", gen_per_class, "graphs per class");

  auto* train = app.add_subcommand("train-target", "train the victim classifier");
  add_common(train);
  std::string train_dataset;
  std::optional<std::size_t> train_wl;
  std::optional<double> train_c;
  train->add_option("--dataset", train_dataset, "dataset JSON-lines file")->required();
  train->add_option("--wl-iters", train_wl, "WL iterations");
  train->add_option("--C", train_c, "SVM soft-margin constant");

  auto* attack = app.add_subcommand("attack", "attack the victim on a test set");
  add_common(attack);
  AttackFlags attack_flags;
  std::string attack_model;
  std::string attack_dataset;
  attack->add_option("--model", attack_model, "trained target file")->required();
  attack->add_option("--dataset", attack_dataset, "dataset JSON-lines file")->required();
  add_attack_flags(attack, attack_flags);

  auto* bench = app.add_subcommand("bench", "run a benchmark spec");
  add_common(bench);
  std::string bench_spec;
  bench->add_option("spec", bench_spec, "benchmark spec JSON file")->required();

  auto* rank = app.add_subcommand("rank", "re-rank an existing result table CSV");
  add_common(rank);
  std::string rank_table;
  double rank_alpha = 0.05;
  rank->add_option("table", rank_table, "result table CSV")->required();
  rank->add_option("--alpha", rank_alpha, "significance level (0.05 or 0.10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      json doc = load_config_file(gen_config);
      if (common.seed) doc["seed"] = *common.seed;
      if (gen_delta) doc["delta"] = *gen_delta;
      if (gen_per_class) doc["graphs_per_class"] = *gen_per_class;
      const json cfg = echo("generator", doc);
      DatasetHandle ds;
      check(advlcd_generate(cfg.dump().c_str(), &ds.p), "gen");
      make_dir(common.out);
      const fs::path data_path = fs::path(common.out) / "dataset.jsonl";
      check(advlcd_dataset_write(ds.p, data_path.string().c_str()), "gen");
      std::size_t total = 0, n_train = 0, n_test = 0;
      check(advlcd_dataset_counts(ds.p, &total, &n_train, &n_test), "gen");
      json manifest;
      manifest["command"] = "gen";
      manifest["seed"] = cfg["seed"];
      manifest["config_hash"] = hash_of(cfg.dump());
      manifest["dataset"] = "dataset.jsonl";
      manifest["graphs"] = total;
      manifest["train"] = n_train;
      manifest["test"] = n_test;
      manifest["separable"] = cfg["delta"].get<double>() > 0.0;
      if (cfg["delta"].get<double>() == 0.0) manifest["note"] = "non-separable: delta = 0";
      manifest["config"] = cfg;
      write_file(fs::path(common.out) / "manifest.json", manifest.dump(2) + "\n");
      emit(common, manifest,
           "wrote " + data_path.string() + " (" + std::to_string(total) + " graphs)\n");
    } else if (*train) {
      json doc;
      if (train_wl) doc["wl_iterations"] = *train_wl;
      if (train_c) doc["C"] = *train_c;
      if (common.seed) doc["seed"] = *common.seed;
      const json options = echo("target", doc.is_null() ? json::object() : doc);
      DatasetHandle ds;
      check(advlcd_dataset_read(train_dataset.c_str(), &ds.p), "train-target");
      TargetHandle target;
      CString metrics;
      check(advlcd_target_train(ds.p, options.dump().c_str(), &target.p, metrics.out()),
            "train-target");
      make_dir(common.out);
      const fs::path model_path = fs::path(common.out) / "target.json";
      check(advlcd_target_save(target.p, model_path.string().c_str()), "train-target");
      json result;
      result["command"] = "train-target";
      result["dataset"] = train_dataset;
      result["model"] = model_path.string();
      result["options"] = options;
      result["metrics"] = parse_json(metrics.str(), "metrics");
      write_file(fs::path(common.out) / "config.json", result.dump(2) + "\n");
      char line[128];
      std::snprintf(line, sizeof line, "train accuracy %.4f, test accuracy %.4f\n",
                    result["metrics"]["train_accuracy"].get<double>(),
                    result["metrics"]["test_accuracy"].get<double>());
      emit(common, result, line);
    } else if (*attack) {
      const json cfg = attack_config(attack_flags, common);
      TargetHandle target;
      check(advlcd_target_load(attack_model.c_str(), &target.p), "attack");
      DatasetHandle ds;
      check(advlcd_dataset_read(attack_dataset.c_str(), &ds.p), "attack");
      CString summary;
      check(advlcd_attack(target.p, ds.p, cfg.dump().c_str(), attack_flags.oracle.c_str(),
                          common.workers, attack_flags.records ? 1 : 0, summary.out()),
            "attack");
      make_dir(common.out);
      write_file(fs::path(common.out) / "summary.json", summary.str() + "\n");
      json echo_doc;
      echo_doc["command"] = "attack";
      echo_doc["model"] = attack_model;
      echo_doc["dataset"] = attack_dataset;
      echo_doc["oracle"] = attack_flags.oracle;
      echo_doc["attack"] = cfg;
      write_file(fs::path(common.out) / "config.json", echo_doc.dump(2) + "\n");
      const json s = parse_json(summary.str(), "summary");
      json brief;
      brief["clean_accuracy"] = s["clean_accuracy"];
      brief["attacked_accuracy"] = s["attacked_accuracy"];
      brief["decline_pp"] = s["decline_pp"];
      brief["summary"] = (fs::path(common.out) / "summary.json").string();
      char line[160];
      std::snprintf(line, sizeof line, "clean %.4f -> attacked %.4f (decline %.2f pp)\n",
                    s["clean_accuracy"].get<double>(), s["attacked_accuracy"].get<double>(),
                    s["decline_pp"].get<double>());
      emit(common, brief, line);
    } else if (*bench) {
      json spec = parse_json(read_file(bench_spec), bench_spec);
      if (common.seed) spec["seed"] = *common.seed;
      const json canonical = echo("bench", spec);
      CString result;
      check(advlcd_bench(canonical.dump().c_str(), common.workers, common.out.c_str(), result.out()),
            "bench");
      const json r = parse_json(result.str(), "bench result");
      std::ostringstream human;
      for (const auto& e : r["experiments"]) {
        human << e["name"].get<std::string>() << ":";
        const auto& methods = e["methods"];
        for (std::size_t m = 0; m < methods.size(); ++m) {
          double avg = 0.0;
          for (const auto& row : e["means"]) avg += row[m].get<double>();
          avg /= static_cast<double>(e["means"].size());
          char cell[96];
          std::snprintf(cell, sizeof cell, " %s %.2f", methods[m].get<std::string>().c_str(), avg);
          human << cell;
        }
        human << '\n';
      }
      human << "outputs in " << common.out << '\n';
      emit(common, r, human.str());
    } else if (*rank) {
      CString report;
      CString cd;
      const std::string out_dir = rank->count("--out") ? common.out : "";
      check(advlcd_rank(rank_table.c_str(), rank_alpha, out_dir.c_str(), report.out(), cd.out()),
            "rank");
      if (common.json_mode) std::cout << report.str();
      else std::cout << cd.str();
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
