#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "advlcd/attack.hpp"
#include "advlcd/stats.hpp"
#include "advlcd/synth.hpp"
#include "advlcd/target.hpp"
#include "json.hpp"

namespace advlcd {

enum class BenchAxis : std::uint8_t { Strategy, Surrogate };

/// One comparison: the methods are strategies or surrogates, every other
/// attack setting comes from the benchmark's base attack config. Each r value
/// is a config; blocks are config x repetition.
struct ExperimentSpec {
  std::string name;
  BenchAxis vary = BenchAxis::Strategy;
  std::vector<std::string> methods;
  std::vector<double> r_values;
};

struct BenchSpec {
  GeneratorConfig generator;
  TargetTrainOptions target;
  AttackConfig attack;
  std::size_t repetitions = 10;
  std::uint64_t seed = 42;
  double alpha = 0.05;
  std::vector<ExperimentSpec> experiments;

  void validate() const;
  /// Unknown keys and an empty experiment list raise InvalidConfig.
  static BenchSpec from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

/// Dataset and victim seeds of repetition `rep`; shared by every cell of
/// the repetition (paired design).
std::uint64_t repetition_seed(std::uint64_t bench_seed, std::size_t rep);

struct RepetitionInfo {
  std::uint64_t seed = 0;
  TargetMetrics metrics;
};

struct AuditTotals {
  std::size_t runs = 0;
  std::size_t graphs_attacked = 0;
  std::size_t records = 0;
  std::size_t max_queries_seen = 0;
  std::size_t max_flips_seen = 0;
  std::size_t violation_count = 0;
  std::vector<std::string> violations;  ///< first few, for the report
};

struct ExperimentResult {
  ExperimentSpec spec;
  ResultTable table;
  /// means[c][m]: mean decline of method m at r_values[c] over repetitions.
  std::vector<std::vector<double>> means;
  std::optional<RankReport> rank;  ///< absent with fewer than 2 blocks or methods
};

struct BenchResult {
  std::vector<RepetitionInfo> repetitions;
  std::vector<ExperimentResult> experiments;
  AuditTotals audit;
};

/// Runs every (experiment, r, method, repetition) cell; results do not
/// depend on `workers`.
BenchResult run_benchmark(const BenchSpec& spec, std::size_t workers = 1);

/// Writes config.json, manifest.json, repetitions.csv, audit.json and per
/// experiment table.csv, means.csv, budget.csv, rank.json, rank.csv and
/// cd.txt under `out_dir`.
void write_bench_outputs(const BenchSpec& spec, const BenchResult& result, const std::string& out_dir);

nlohmann::ordered_json target_options_to_json(const TargetTrainOptions& options);
TargetTrainOptions target_options_from_json(const nlohmann::json& doc);

}  // namespace advlcd
