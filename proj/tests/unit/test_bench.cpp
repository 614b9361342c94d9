#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "advlcd/bench.hpp"
#include "helpers.hpp"

using namespace advlcd;
using testutil::code_of;
namespace fs = std::filesystem;

namespace {

BenchSpec tiny_spec() {
  BenchSpec spec;
  spec.generator.graphs_per_class = 30;
  spec.generator.test_per_class = 8;
  spec.attack.max_queries = 10;
  spec.attack.k_candidates = 5;
  spec.attack.rounds = 2;
  spec.repetitions = 2;
  spec.experiments.push_back({"strategies", BenchAxis::Strategy,
                               {"eigencentrality", "random_walk"}, {0.001, 0.003}});
  spec.experiments.push_back({"surrogates", BenchAxis::Surrogate, {"svm_rbf", "naive_bayes"}, {0.001}});
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Bench, SingleCellShape) {
  BenchSpec spec = tiny_spec();
  spec.experiments = {{"one", BenchAxis::Strategy, {"random_walk"}, {0.002}}};
  const auto result = run_benchmark(spec);
  ASSERT_EQ(result.experiments.size(), 1u);
  const auto& table = result.experiments[0].table;
  EXPECT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.methods, (std::vector<std::string>{"random_walk"}));
  EXPECT_EQ(table.cells.size(), 2u);
  EXPECT_EQ(table.cells[0].size(), 1u);
  EXPECT_FALSE(result.experiments[0].rank.has_value());
  EXPECT_EQ(result.repetitions.size(), 2u);
}

TEST(Bench, PairedDesignSharesTargets) {
  // The surrogate experiment's svm_rbf column uses the base strategy
  // (eigencentrality), so at r = 0.001 it must equal the strategy column.
  const auto result = run_benchmark(tiny_spec());
  const auto& strat = result.experiments[0];
  const auto& surr = result.experiments[1];
  ASSERT_EQ(surr.table.rows.size(), 2u);
  for (std::size_t rep = 0; rep < 2; ++rep) {
    EXPECT_EQ(strat.table.cells[rep][0], surr.table.cells[rep][0]);
  }
  EXPECT_NE(result.repetitions[0].seed, result.repetitions[1].seed);
  EXPECT_EQ(result.repetitions[0].seed, repetition_seed(42, 0));
  EXPECT_EQ(result.audit.violation_count, 0u);
  EXPECT_LE(result.audit.max_queries_seen, 10u);
  ASSERT_TRUE(strat.rank.has_value());
  EXPECT_EQ(strat.rank->n, 4u);  // 2 budgets x 2 repetitions
  EXPECT_EQ(strat.means.size(), 2u);
}

TEST(Bench, SpecValidation) {
  EXPECT_EQ(code_of([] { BenchSpec::from_json(nlohmann::json::object()); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { BenchSpec::from_json({{"experiments", nlohmann::json::array()}}); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { BenchSpec::from_json({{"bogus", 1}}); }), ErrorCode::InvalidConfig);
  auto bad_method = tiny_spec().to_json();
  bad_method["experiments"][0]["methods"][0] = "svm_rbf";
  EXPECT_EQ(code_of([&] { BenchSpec::from_json(bad_method); }), ErrorCode::InvalidConfig);
  const auto spec = tiny_spec();
  EXPECT_EQ(BenchSpec::from_json(spec.to_json()).to_json().dump(), spec.to_json().dump());
}

TEST(Bench, OutputsIndependentOfWorkers) {
  const auto spec = tiny_spec();
  const auto base = fs::temp_directory_path() / "advlcd_bench_test";
  fs::remove_all(base);
  write_bench_outputs(spec, run_benchmark(spec, 1), (base / "w1").string());
  write_bench_outputs(spec, run_benchmark(spec, 3), (base / "w3").string());
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "w1")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), base / "w1");
    ASSERT_TRUE(fs::exists(base / "w3" / rel)) << rel;
    EXPECT_EQ(slurp(entry.path()), slurp(base / "w3" / rel)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 10u);
  EXPECT_TRUE(fs::exists(base / "w1" / "strategies" / "table.csv"));
  EXPECT_TRUE(fs::exists(base / "w1" / "strategies" / "cd.txt"));
  fs::remove_all(base);
}
