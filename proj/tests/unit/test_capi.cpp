#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "advlcd/advlcd.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Takes ownership of a library-allocated string.
std::string take(char* text) {
  std::string out = text ? text : "";
  advlcd_string_free(text);
  return out;
}

const char* kSmallGenerator = R"({"graphs_per_class": 30, "test_per_class": 8, "seed": 5})";

struct Fixture {
  advlcd_dataset* ds = nullptr;
  advlcd_target* target = nullptr;
  Fixture() {
    EXPECT_EQ(advlcd_generate(kSmallGenerator, &ds), ADVLCD_OK);
    EXPECT_EQ(advlcd_target_train(ds, nullptr, &target, nullptr), ADVLCD_OK);
  }
  ~Fixture() {
    advlcd_target_free(target);
    advlcd_dataset_free(ds);
  }
};

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STRNE(advlcd_version(), "");
  EXPECT_STREQ(advlcd_status_name(ADVLCD_OK), "ok");
  EXPECT_STRNE(advlcd_status_name(ADVLCD_ERR_QUERY_BUDGET_EXHAUSTED), advlcd_status_name(ADVLCD_OK));
}

TEST(CApi, ConfigEchoFillsDefaultsAndRejectsUnknownKeys) {
  char* out = nullptr;
  ASSERT_EQ(advlcd_config_echo("attack", nullptr, &out), ADVLCD_OK);
  const auto doc = json::parse(take(out));
  EXPECT_EQ(doc["max_queries"], 50);
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(advlcd_config_echo("generator", R"({"colour": 1})", &out), ADVLCD_ERR_INVALID_CONFIG);
  EXPECT_NE(std::string(advlcd_last_error()).find("colour"), std::string::npos);
  EXPECT_EQ(advlcd_config_echo("bench", "", &out), ADVLCD_ERR_INVALID_CONFIG);
  EXPECT_EQ(advlcd_config_echo("nonsense", nullptr, &out), ADVLCD_ERR_INVALID_CONFIG);
  EXPECT_EQ(advlcd_config_echo("attack", "{not json", &out), ADVLCD_ERR_INVALID_CONFIG);
  EXPECT_NE(std::string(advlcd_last_error()).find("invalid JSON"), std::string::npos);
  EXPECT_EQ(advlcd_config_echo(nullptr, nullptr, &out), ADVLCD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, HashIsStableHex) {
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(advlcd_hash_text("abc", &a), ADVLCD_OK);
  ASSERT_EQ(advlcd_hash_text("abc", &b), ADVLCD_OK);
  const auto ha = take(a), hb = take(b);
  EXPECT_EQ(ha, hb);
  EXPECT_EQ(ha.size(), 32u);
  EXPECT_EQ(ha.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(advlcd_generate(kSmallGenerator, nullptr), ADVLCD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(advlcd_dataset_read(nullptr, nullptr), ADVLCD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(advlcd_target_train(nullptr, nullptr, nullptr, nullptr), ADVLCD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, DatasetLifecycle) {
  advlcd_dataset* ds = nullptr;
  ASSERT_EQ(advlcd_generate(kSmallGenerator, &ds), ADVLCD_OK);
  std::size_t total = 0, train = 0, test = 0;
  ASSERT_EQ(advlcd_dataset_counts(ds, &total, &train, &test), ADVLCD_OK);
  EXPECT_EQ(total, 60u);
  EXPECT_EQ(train, 44u);
  EXPECT_EQ(test, 16u);

  const auto path = (fs::temp_directory_path() / "advlcd_capi_ds.jsonl").string();
  ASSERT_EQ(advlcd_dataset_write(ds, path.c_str()), ADVLCD_OK);
  advlcd_dataset* back = nullptr;
  ASSERT_EQ(advlcd_dataset_read(path.c_str(), &back), ADVLCD_OK);
  std::size_t total2 = 0;
  advlcd_dataset_counts(back, &total2, nullptr, nullptr);
  EXPECT_EQ(total2, total);
  advlcd_dataset_free(back);
  advlcd_dataset_free(ds);
  fs::remove(path);

  advlcd_dataset* missing = nullptr;
  EXPECT_EQ(advlcd_dataset_read("/nonexistent/ds.jsonl", &missing), ADVLCD_ERR_IO);
  EXPECT_EQ(missing, nullptr);
  EXPECT_NE(std::string(advlcd_last_error()).find("/nonexistent/ds.jsonl"), std::string::npos);
  EXPECT_EQ(advlcd_generate(R"({"graphs_per_class": 0})", &missing), ADVLCD_ERR_INVALID_CONFIG);
}

TEST(CApi, TargetTrainSaveLoadEvaluate) {
  Fixture f;
  char* metrics = nullptr;
  ASSERT_EQ(advlcd_target_evaluate(f.target, f.ds, &metrics), ADVLCD_OK);
  const auto m = json::parse(take(metrics));
  EXPECT_GE(m["test_accuracy"].get<double>(), 0.5);

  const auto path = (fs::temp_directory_path() / "advlcd_capi_target.json").string();
  ASSERT_EQ(advlcd_target_save(f.target, path.c_str()), ADVLCD_OK);
  advlcd_target* loaded = nullptr;
  ASSERT_EQ(advlcd_target_load(path.c_str(), &loaded), ADVLCD_OK);
  char* again = nullptr;
  ASSERT_EQ(advlcd_target_evaluate(loaded, f.ds, &again), ADVLCD_OK);
  EXPECT_EQ(json::parse(take(again)), m);
  advlcd_target_free(loaded);
  fs::remove(path);
}

TEST(CApi, AttackSummaries) {
  Fixture f;
  char* summary = nullptr;
  ASSERT_EQ(advlcd_attack(f.target, f.ds, R"({"max_queries": 0})", nullptr, 1, 0, &summary), ADVLCD_OK);
  EXPECT_EQ(json::parse(take(summary))["decline_pp"].get<double>(), 0.0);

  const char* cfg = R"({"r": 0.003, "max_queries": 10, "k_candidates": 5, "rounds": 2})";
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(advlcd_attack(f.target, f.ds, cfg, "score", 1, 1, &a), ADVLCD_OK);
  ASSERT_EQ(advlcd_attack(f.target, f.ds, cfg, "score", 2, 1, &b), ADVLCD_OK);
  EXPECT_EQ(take(a), take(b));
  EXPECT_EQ(advlcd_attack(f.target, f.ds, cfg, "telepathy", 1, 0, &a), ADVLCD_ERR_INVALID_CONFIG);
}

TEST(CApi, BenchAndRank) {
  const auto dir = fs::temp_directory_path() / "advlcd_capi_rank";
  fs::remove_all(dir);
  fs::create_directories(dir);
  char* out = nullptr;
  EXPECT_EQ(advlcd_bench("{}", 1, dir.c_str(), &out), ADVLCD_ERR_INVALID_CONFIG);
  EXPECT_EQ(advlcd_bench("{}", 1, nullptr, &out), ADVLCD_ERR_INVALID_ARGUMENT);
  {
    std::ofstream csv(dir / "table.csv");
    csv << "block,A,B,C\nr1,-30,-20,-10\nr2,-25,-24,-1\nr3,-9,-8,-7\nr4,-40,-2,0\n";
  }
  char* report = nullptr;
  char* cd = nullptr;
  ASSERT_EQ(advlcd_rank((dir / "table.csv").c_str(), 0.05, dir.c_str(), &report, &cd), ADVLCD_OK);
  const auto r = json::parse(take(report));
  EXPECT_NEAR(r["friedman_statistic"].get<double>(), 8.0, 1e-12);
  EXPECT_FALSE(take(cd).empty());
  EXPECT_TRUE(fs::exists(dir / "rank.json"));
  EXPECT_TRUE(fs::exists(dir / "cd.txt"));
  EXPECT_EQ(advlcd_rank((dir / "missing.csv").c_str(), 0.05, nullptr, &report, nullptr), ADVLCD_ERR_IO);
  fs::remove_all(dir);
}
