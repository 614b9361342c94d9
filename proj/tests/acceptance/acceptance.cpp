// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: acceptance [--skip-bench] [--workers N]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "advlcd/bench.hpp"
#include "advlcd/learners.hpp"
#include "advlcd/perturb.hpp"
#include "advlcd/stats.hpp"
#include "advlcd/wl.hpp"
#include "oracles.hpp"

using namespace advlcd;
namespace fs = std::filesystem;

namespace {

constexpr double kCosineTol = 1e-8;
constexpr double kDualTol = 1e-4;
constexpr double kCdExpected = 2.0977;
constexpr double kCdTol = 1e-3;
constexpr double kEigenMargin = 2.0;  // pp over random walk
constexpr double kFriedmanAlpha = 0.05;
constexpr double kC1Seconds = 5.0, kC2Seconds = 10.0, kC3Seconds = 30.0, kC5Seconds = 600.0;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool connected(const LabeledGraph& g) {
  std::vector<bool> seen(g.node_count(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (NodeId u : g.neighbors(v)) {
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == g.node_count();
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worst = 1.0;
  int graphs = 0;
  while (graphs < 100) {
    const std::size_t n = 2 + rng() % 9;
    const auto g = oracle::random_graph(rng, n, 0.45);
    if (!connected(g)) continue;
    ++graphs;
    const auto x = eigencentrality(g).x;
    const auto e = oracle::jacobi(oracle::adjacency(g));
    std::size_t top = 0;
    for (std::size_t k = 1; k < e.values.size(); ++k) {
      if (e.values[k] > e.values[top]) top = k;
    }
    double dotp = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dotp += x[i] * e.vectors[top][i];
      nx += x[i] * x[i];
      ny += e.vectors[top][i] * e.vectors[top][i];
    }
    worst = std::min(worst, std::abs(dotp) / std::sqrt(nx * ny));
  }
  const double secs = seconds_since(t0);
  report(1, worst >= 1.0 - kCosineTol && secs < kC1Seconds,
         fmt("min cosine %.12f over 100 connected graphs (n<=10), %.2fs", worst, secs));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t h = kDefaultWlIterations;
  std::mt19937_64 rng(2);
  bool invariant = true, kernel = true, sums = true;
  std::size_t pairs = 0;
  LabelDictionary dict;
  for (int i = 0; i < 200; ++i) {
    const auto a = oracle::random_graph(rng, 3 + rng() % 10, 0.3);
    const auto b = oracle::random_graph(rng, 3 + rng() % 10, 0.3);
    const auto pa = wl_feature_vector(a, h, dict);
    const auto pb = wl_feature_vector(b, h, dict);
    const double k = dot(pa.to_sparse(), pb.to_sparse());
    kernel &= k == static_cast<double>(oracle::wl_kernel(a, b, h));
    ++pairs;
    for (const auto& c : pa.counts_per_iteration()) sums &= c == a.node_count();
    if (i < 40) {
      for (int p = 0; p < 50; ++p) {
        const auto perm = oracle::random_permutation(rng, a.node_count());
        invariant &= wl_feature_vector(oracle::permute(a, perm), h, dict) == pa;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(2, invariant && kernel && sums && secs < kC2Seconds,
         std::string("permutation-invariant ") + (invariant ? "yes" : "no") + ", kernel oracle " +
             (kernel ? "exact" : "MISMATCH") + " on " + std::to_string(pairs) + " pairs, sums=n " +
             (sums ? "yes" : "no") + fmt(", %.2fs", secs));
}

/// KKT violation recomputed from the model's own decision function.
double independent_kkt(const TrainedSvm& m, const std::vector<SparseVector>& x,
                       const std::vector<int>& y, const std::vector<double>& alpha, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double yf = y[i] * m.decision(x[i]);
    double v = 0.0;
    if (alpha[i] <= 0.0) v = std::max(0.0, 1.0 - yf);
    else if (alpha[i] >= c) v = std::max(0.0, yf - 1.0);
    else v = std::abs(yf - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.6);
  double worst_kkt = 0.0, worst_gap = 0.0;
  bool kkt_ok = true;
  const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::rbf(0.5), KernelSpec::polynomial(2, 1.0)};
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<SparseVector> x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
      const int label = i % 2 ? 1 : -1;
      x.push_back(SparseVector::from_pairs({{0u, label * 0.7 + noise(rng)}, {1u, label * 0.7 + noise(rng)}}));
      y.push_back(label);
    }
    const auto& kernel = kernels[trial % 3];
    SvmOptions opt;
    opt.C = trial % 2 ? 1.0 : 4.0;
    SvmTrainReport rep;
    const auto m = svm_train(x, y, kernel, opt, &rep);
    const double kkt = independent_kkt(m, x, y, rep.alpha, opt.C);
    worst_kkt = std::max(worst_kkt, kkt);
    kkt_ok &= kkt <= opt.tol;
    oracle::Matrix k(x.size(), std::vector<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) k[i][j] = kernel_eval(kernel, x[i], x[j]);
    const auto a = oracle::dual_qp(k, y, opt.C, 20000);
    worst_gap = std::max(worst_gap, std::abs(rep.dual_objective - oracle::dual_value(k, y, a)));
  }

  std::vector<SparseVector> xor_x;
  std::vector<int> xor_y;
  for (int i = 0; i < 4; ++i) {
    const double a = i & 1, b = (i >> 1) & 1;
    xor_x.push_back(SparseVector::from_pairs({{0u, a}, {1u, b}}));
    xor_y.push_back((i == 1 || i == 2) ? 1 : -1);
  }
  SvmOptions xopt;
  xopt.C = 100.0;
  SvmTrainReport xrep;
  const auto xm = svm_train(xor_x, xor_y, KernelSpec::rbf(1.0), xopt, &xrep);
  int correct = 0;
  for (std::size_t i = 0; i < 4; ++i) correct += svm_predict(xm, xor_x[i]).label == xor_y[i];
  const double xkkt = independent_kkt(xm, xor_x, xor_y, xrep.alpha, xopt.C);
  worst_kkt = std::max(worst_kkt, xkkt);
  kkt_ok &= xkkt <= xopt.tol;

  const double secs = seconds_since(t0);
  report(3, kkt_ok && worst_gap <= kDualTol && correct == 4 && secs < kC3Seconds,
         fmt("max KKT %.2e (tol 1e-3), max dual gap %.2e, XOR-RBF train acc %.0f/4, %.2fs",
             worst_kkt, worst_gap, correct, secs));
}

void criterion4() {
  const double cd = critical_difference(4, 5, 0.05);
  ResultTable t{{"r1", "r2", "r3", "r4"},
                {"A", "B", "C"},
                {{-30, -20, -10}, {-25, -24, -1}, {-9, -8, -7}, {-40, -2, 0}}};
  const auto rep = friedman_nemenyi(t);
  const bool dominance = rep.methods[0].mean_rank == 3.0 && rep.methods[2].mean_rank == 1.0 &&
                         std::abs(rep.friedman_statistic - 8.0) < 1e-12 &&
                         std::abs(rep.p_value - std::exp(-4.0)) < 1e-12;
  std::mt19937_64 rng(4);
  bool sums = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 9, n = 2 + rng() % 20;
    ResultTable r;
    for (std::size_t j = 0; j < k; ++j) r.methods.push_back("m" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
      r.rows.push_back("b" + std::to_string(i));
      std::vector<double> row;
      for (std::size_t j = 0; j < k; ++j) row.push_back(static_cast<double>(rng() % 5));
      r.cells.push_back(row);
    }
    double s = 0.0;
    for (const auto& m : friedman_nemenyi(r).methods) s += m.mean_rank;
    sums &= std::abs(s - k * (k + 1) / 2.0) < 1e-9;
  }
  report(4, std::abs(cd - kCdExpected) <= kCdTol && dominance && sums,
         fmt("CD(k=4,N=5) %.4f, dominance fixture ", cd) + (dominance ? "ok" : "WRONG") +
             (sums ? ", rank sums ok" : ", rank sums WRONG"));
}

double average(const ExperimentResult& e, std::size_t m) {
  double s = 0.0;
  for (const auto& row : e.means) s += row[m];
  return s / static_cast<double>(e.means.size());
}

std::size_t column(const ExperimentResult& e, const std::string& name) {
  for (std::size_t m = 0; m < e.spec.methods.size(); ++m) {
    if (e.spec.methods[m] == name) return m;
  }
  std::fprintf(stderr, "method %s missing from experiment %s\n", name.c_str(), e.spec.name.c_str());
  std::exit(2);
}

const ExperimentResult& experiment(const BenchResult& r, BenchAxis axis) {
  for (const auto& e : r.experiments) {
    if (e.spec.vary == axis) return e;
  }
  std::fprintf(stderr, "reference spec lacks an experiment on that axis\n");
  std::exit(2);
}

void criteria5to8(const std::string& spec_path, std::size_t workers) {
  std::ifstream in(spec_path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", spec_path.c_str());
    std::exit(2);
  }
  const auto spec = BenchSpec::from_json(nlohmann::json::parse(in));
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_benchmark(spec, workers);
  const double secs = seconds_since(t0);

  const auto& strat = experiment(result, BenchAxis::Strategy);
  const double ec = average(strat, column(strat, "eigencentrality"));
  const double sp = average(strat, column(strat, "shortest_path"));
  const double rw = average(strat, column(strat, "random_walk"));
  report(5, ec < sp && sp < rw && rw - ec >= kEigenMargin && secs < kC5Seconds,
         fmt("mean decline pp: eigencentrality %.2f, shortest_path %.2f, random_walk %.2f, bench %.0fs",
             ec, sp, rw, secs));

  const auto& surr = experiment(result, BenchAxis::Surrogate);
  const auto rbf = column(surr, "svm_rbf");
  const double rbf_mean = average(surr, rbf);
  const double lin_mean = average(surr, column(surr, "svm_linear"));
  bool rbf_best = false;
  double p = 1.0;
  std::string ranks;
  if (surr.rank) {
    p = surr.rank->p_value;
    rbf_best = true;
    for (std::size_t m = 0; m < surr.rank->methods.size(); ++m) {
      const double mr = surr.rank->methods[m].mean_rank;
      if (m != rbf && mr >= surr.rank->methods[rbf].mean_rank) rbf_best = false;
      ranks += fmt(" %.2f", mr);
    }
  }
  report(6, rbf_mean <= lin_mean && p < kFriedmanAlpha && rbf_best,
         fmt("rbf %.2f vs linear %.2f pp, Friedman p %.3g", rbf_mean, lin_mean, p) +
             ", mean ranks" + ranks + " (higher = larger decline; order " +
             [&] {
               std::string s;
               for (const auto& m : surr.spec.methods) s += (s.empty() ? "" : ",") + m;
               return s;
             }() + ")");

  bool monotone = true;
  std::size_t checked = 0;
  for (const auto& e : result.experiments) {
    for (std::size_t m = 0; m < e.spec.methods.size(); ++m) {
      for (std::size_t c = 1; c < e.means.size(); ++c) {
        monotone &= e.means[c][m] <= e.means[c - 1][m];
        ++checked;
      }
    }
  }
  report(7, monotone, "per-method mean decline non-increasing in r (" + std::to_string(checked) +
                          " adjacent pairs checked)");

  bool architecture = true;
#ifdef ADVLCD_ARCH_TEST
  const int status = std::system(ADVLCD_ARCH_TEST " >/dev/null 2>&1");
  architecture = WIFEXITED(status) && WEXITSTATUS(status) == 0;
#endif
  const auto& a = result.audit;
  report(8,
         architecture && a.violation_count == 0 && a.max_queries_seen <= spec.attack.max_queries,
         std::string("architecture test ") + (architecture ? "passed" : "FAILED") + ", " +
             std::to_string(a.records) + " queried graphs audited, " +
             std::to_string(a.violation_count) + " violations, max queries " +
             std::to_string(a.max_queries_seen) + "/" + std::to_string(spec.attack.max_queries));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion9() {
  BenchSpec spec;
  spec.generator.graphs_per_class = 40;
  spec.generator.test_per_class = 10;
  spec.attack.max_queries = 12;
  spec.attack.k_candidates = 4;
  spec.attack.rounds = 3;
  spec.repetitions = 3;
  spec.experiments.push_back({"strategies", BenchAxis::Strategy,
                              {"eigencentrality", "shortest_path", "random_walk"}, {0.001, 0.002}});
  spec.experiments.push_back({"surrogates", BenchAxis::Surrogate,
                              {"svm_rbf", "svm_linear", "svm_poly", "naive_bayes"}, {0.002}});
  const auto base = fs::temp_directory_path() / "advlcd_acceptance_workers";
  fs::remove_all(base);
  const std::size_t worker_counts[] = {1, 2, 4};
  for (auto w : worker_counts) {
    write_bench_outputs(spec, run_benchmark(spec, w), (base / std::to_string(w)).string());
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "1")) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const auto rel = fs::relative(entry.path(), base / "1");
    ++files;
    for (auto w : worker_counts) {
      if (slurp(entry.path()) != slurp(base / std::to_string(w) / rel)) {
        ++differing;
        break;
      }
    }
  }
  fs::remove_all(base);
  report(9, files > 0 && differing == 0,
         std::to_string(files) + " CSV files compared across workers {1,2,4}, " +
             std::to_string(differing) + " differ");
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_bench = false;
  std::size_t workers = 1;
  std::string spec_path = ADVLCD_REFERENCE_SPEC;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-bench") == 0) skip_bench = true;
    else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::stoul(argv[++i]);
    else if (std::strcmp(argv[i], "--spec") == 0 && i + 1 < argc) spec_path = argv[++i];
    else {
      std::fprintf(stderr, "usage: acceptance [--skip-bench] [--workers N] [--spec FILE]\n");
      return 2;
    }
  }
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    if (skip_bench) std::printf("criteria 5-8: SKIPPED (--skip-bench)\n");
    else criteria5to8(spec_path, workers);
    criterion9();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
