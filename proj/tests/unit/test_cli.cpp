#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "advlcd_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

/// Runs the CLI with `args`, stdout to `stdout_file` (if given); returns the exit code.
int run(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = std::string(ADVLCD_CLI_PATH) + " " + args;
  cmd += stdout_file.empty() ? " >/dev/null" : " >" + stdout_file.string();
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const fs::path& small_config() {
  static const fs::path p = [] {
    auto f = work() / "gen.json";
    write(f, R"({"graphs_per_class": 24, "test_per_class": 6})");
    return f;
  }();
  return p;
}

/// Generates a small dataset and trains a target once for the attack tests.
const fs::path& trained() {
  static const fs::path dir = [] {
    auto d = work() / "trained";
    EXPECT_EQ(run("gen --config " + small_config().string() + " --out " + d.string()), 0);
    EXPECT_EQ(run("train-target --dataset " + (d / "dataset.jsonl").string() + " --out " + d.string()), 0);
    return d;
  }();
  return dir;
}

std::string attack_args(const fs::path& out, const std::string& extra) {
  const auto& d = trained();
  return "attack --model " + (d / "target.json").string() + " --dataset " +
         (d / "dataset.jsonl").string() + " --out " + out.string() +
         " --r 0.003 --k-candidates 5 --rounds 2 " + extra;
}

}  // namespace

TEST(Cli, GenIsByteIdentical) {
  const auto a = work() / "gen_a", b = work() / "gen_b";
  ASSERT_EQ(run("gen --config " + small_config().string() + " --seed 9 --out " + a.string()), 0);
  ASSERT_EQ(run("gen --config " + small_config().string() + " --seed 9 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "dataset.jsonl"), slurp(b / "dataset.jsonl"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  const auto manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["graphs"], 48);
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_TRUE(manifest["separable"].get<bool>());
}

TEST(Cli, ZeroDeltaIsFlagged) {
  const auto d = work() / "gen_flat";
  ASSERT_EQ(run("gen --config " + small_config().string() + " --delta 0 --out " + d.string()), 0);
  const auto manifest = json::parse(slurp(d / "manifest.json"));
  EXPECT_FALSE(manifest["separable"].get<bool>());
  EXPECT_NE(manifest["note"].get<std::string>().find("non-separable"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("gen --graphs-per-class 0 --out " + (work() / "bad").string()), 2);
  EXPECT_EQ(run("gen --workers 0"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("train-target --dataset /nonexistent/ds.jsonl --out " + (work() / "x").string()), 3);
  EXPECT_EQ(run("bench /nonexistent/spec.json"), 3);
  const auto empty = work() / "empty_spec.json";
  write(empty, "{}");
  EXPECT_EQ(run("bench " + empty.string() + " --out " + (work() / "b").string()), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, ZeroQueriesMeansNoDecline) {
  const auto out = work() / "attack0";
  ASSERT_EQ(run(attack_args(out, "--max-queries 0 --json"), work() / "attack0.out"), 0);
  const auto brief = json::parse(slurp(work() / "attack0.out"));
  EXPECT_EQ(brief["decline_pp"].get<double>(), 0.0);
  EXPECT_EQ(brief["clean_accuracy"], brief["attacked_accuracy"]);
}

TEST(Cli, AttackIsDeterministic) {
  const auto a = work() / "attack_a", b = work() / "attack_b";
  ASSERT_EQ(run(attack_args(a, "--max-queries 10 --workers 1")), 0);
  ASSERT_EQ(run(attack_args(b, "--max-queries 10 --workers 2")), 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  const auto summary = json::parse(slurp(a / "summary.json"));
  EXPECT_LE(summary["decline_pp"].get<double>(), 0.0);
}

TEST(Cli, RankPrintsReport) {
  const auto table = work() / "table.csv";
  write(table, "block,A,B,C\nr1,-30,-20,-10\nr2,-25,-24,-1\nr3,-9,-8,-7\nr4,-40,-2,0\n");
  ASSERT_EQ(run("rank " + table.string() + " --json", work() / "rank.out"), 0);
  const auto report = json::parse(slurp(work() / "rank.out"));
  EXPECT_NEAR(report["friedman_statistic"].get<double>(), 8.0, 1e-12);
  EXPECT_EQ(run("rank " + table.string() + " --alpha 0.01"), 2);
}
