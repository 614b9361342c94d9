#include "advlcd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advlcd/error.hpp"
#include "advlcd/parallel.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

namespace fs = std::filesystem;

namespace {

const char* to_string(BenchAxis axis) {
  return axis == BenchAxis::Strategy ? "strategy" : "surrogate";
}

void apply_method(AttackConfig& cfg, BenchAxis axis, const std::string& method) {
  if (axis == BenchAxis::Strategy) cfg.strategy = parse_strategy(method);
  else cfg.surrogate = parse_surrogate(method);
}

template <typename Fn>
void with_json_errors(const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, what + ": " + e.what());
  }
}

ExperimentSpec experiment_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "experiment must be a JSON object");
  ExperimentSpec e;
  with_json_errors("experiment", [&] {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const auto& v = it.value();
      if (it.key() == "name") e.name = v.get<std::string>();
      else if (it.key() == "vary") {
        const auto axis = v.get<std::string>();
        if (axis == "strategy") e.vary = BenchAxis::Strategy;
        else if (axis == "surrogate") e.vary = BenchAxis::Surrogate;
        else fail(ErrorCode::InvalidConfig, "experiment: vary must be strategy or surrogate");
      } else if (it.key() == "methods") e.methods = v.get<std::vector<std::string>>();
      else if (it.key() == "r_values") e.r_values = v.get<std::vector<double>>();
      else fail(ErrorCode::InvalidConfig, "experiment: unknown key \"" + it.key() + "\"");
    }
  });
  return e;
}

}  // namespace

nlohmann::ordered_json target_options_to_json(const TargetTrainOptions& o) {
  nlohmann::ordered_json doc;
  doc["wl_iterations"] = o.wl_iterations;
  doc["C"] = o.C;
  doc["tol"] = o.tol;
  doc["max_passes"] = o.max_passes;
  doc["seed"] = o.seed;
  return doc;
}

TargetTrainOptions target_options_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "target options must be a JSON object");
  TargetTrainOptions o;
  with_json_errors("target options", [&] {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const auto& v = it.value();
      if (it.key() == "wl_iterations") o.wl_iterations = v.get<std::size_t>();
      else if (it.key() == "C") o.C = v.get<double>();
      else if (it.key() == "tol") o.tol = v.get<double>();
      else if (it.key() == "max_passes") o.max_passes = v.get<std::size_t>();
      else if (it.key() == "seed") o.seed = v.get<std::uint64_t>();
      else fail(ErrorCode::InvalidConfig, "target options: unknown key \"" + it.key() + "\"");
    }
  });
  if (!(o.C > 0.0) || !(o.tol > 0.0) || o.max_passes == 0) {
    fail(ErrorCode::InvalidConfig, "target options: C, tol and max_passes must be positive");
  }
  return o;
}

void BenchSpec::validate() const {
  generator.validate();
  attack.validate();
  if (repetitions == 0) fail(ErrorCode::InvalidConfig, "repetitions must be >= 1");
  nemenyi_q(2, alpha);  // rejects unsupported alpha
  if (experiments.empty()) fail(ErrorCode::InvalidConfig, "benchmark needs at least one experiment");
  std::vector<std::string> names;
  for (const auto& e : experiments) {
    if (e.name.empty() || e.name.find_first_of("/\\") != std::string::npos || e.name == "." ||
        e.name == "..") {
      fail(ErrorCode::InvalidConfig, "experiment names must be non-empty plain file names");
    }
    if (std::find(names.begin(), names.end(), e.name) != names.end()) {
      fail(ErrorCode::InvalidConfig, "duplicate experiment name \"" + e.name + "\"");
    }
    names.push_back(e.name);
    if (e.methods.empty()) fail(ErrorCode::InvalidConfig, e.name + ": no methods");
    if (e.r_values.empty()) fail(ErrorCode::InvalidConfig, e.name + ": no r values");
    for (const auto& m : e.methods) {
      AttackConfig probe = attack;
      apply_method(probe, e.vary, m);
      if (std::count(e.methods.begin(), e.methods.end(), m) > 1) {
        fail(ErrorCode::InvalidConfig, e.name + ": duplicate method " + m);
      }
    }
    for (double r : e.r_values) {
      if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::InvalidConfig, e.name + ": r must be > 0");
    }
  }
}

BenchSpec BenchSpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.empty()) {
    fail(ErrorCode::InvalidConfig, "benchmark spec must be a non-empty JSON object");
  }
  BenchSpec spec;
  with_json_errors("benchmark spec", [&] {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const auto& v = it.value();
      const std::string& k = it.key();
      if (k == "generator") spec.generator = GeneratorConfig::from_json(v);
      else if (k == "target") spec.target = target_options_from_json(v);
      else if (k == "attack") spec.attack = AttackConfig::from_json(v);
      else if (k == "repetitions") spec.repetitions = v.get<std::size_t>();
      else if (k == "seed") spec.seed = v.get<std::uint64_t>();
      else if (k == "alpha") spec.alpha = v.get<double>();
      else if (k == "experiments") {
        if (!v.is_array()) fail(ErrorCode::InvalidConfig, "experiments must be an array");
        for (const auto& e : v) spec.experiments.push_back(experiment_from_json(e));
      } else {
        fail(ErrorCode::InvalidConfig, "benchmark spec: unknown key \"" + k + "\"");
      }
    }
  });
  spec.validate();
  return spec;
}

nlohmann::ordered_json BenchSpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["generator"] = generator.to_json();
  doc["target"] = target_options_to_json(target);
  doc["attack"] = attack.to_json();
  doc["repetitions"] = repetitions;
  doc["seed"] = seed;
  doc["alpha"] = alpha;
  auto& exps = doc["experiments"] = nlohmann::ordered_json::array();
  for (const auto& e : experiments) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["vary"] = to_string(e.vary);
    j["methods"] = e.methods;
    j["r_values"] = e.r_values;
    exps.push_back(std::move(j));
  }
  return doc;
}

std::uint64_t repetition_seed(std::uint64_t bench_seed, std::size_t rep) {
  return mix_seed(bench_seed, static_cast<std::uint64_t>(rep));
}

namespace {

struct Cell {
  std::size_t experiment;
  std::size_t config;
  std::size_t method;
  std::size_t rep;
};

struct CellResult {
  double decline = 0.0;
  AuditTotals audit;
};

std::string r_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r=%g", r);
  return buf;
}

}  // namespace

BenchResult run_benchmark(const BenchSpec& spec, std::size_t workers) {
  spec.validate();
  BenchResult result;

  // One dataset and one victim per repetition, shared by every cell.
  struct Rep {
    GraphDataset test;
    std::shared_ptr<const TargetModel> model;
  };
  std::vector<std::optional<Rep>> reps(spec.repetitions);
  result.repetitions.resize(spec.repetitions);
  parallel_for(spec.repetitions, workers, [&](std::size_t rep) {
    GeneratorConfig gen = spec.generator;
    gen.seed = repetition_seed(spec.seed, rep);
    const GraphDataset ds = generate(gen);
    TrainedTarget trained = train_target(ds, spec.target);
    result.repetitions[rep] = RepetitionInfo{gen.seed, trained.metrics};
    reps[rep] = Rep{ds.subset(Split::Test), std::move(trained.model)};
  });

  std::vector<Cell> cells;
  for (std::size_t e = 0; e < spec.experiments.size(); ++e) {
    const auto& ex = spec.experiments[e];
    for (std::size_t c = 0; c < ex.r_values.size(); ++c) {
      for (std::size_t m = 0; m < ex.methods.size(); ++m) {
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) cells.push_back({e, c, m, rep});
      }
    }
  }

  std::vector<CellResult> outcomes(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const auto& ex = spec.experiments[cell.experiment];
    AttackConfig cfg = spec.attack;
    cfg.r = ex.r_values[cell.config];
    apply_method(cfg, ex.vary, ex.methods[cell.method]);
    // Same attack seed for every method of a repetition.
    cfg.seed = mix_seed(repetition_seed(spec.seed, cell.rep), 0xa77ac4ULL);
    const Rep& rep = *reps[cell.rep];
    TargetModelService service(rep.model);
    const AttackSummary summary = attack_testset(service, rep.test, cfg, 1);

    CellResult& out = outcomes[i];
    out.decline = summary.decline_pp;
    out.audit.runs = 1;
    for (std::size_t g = 0; g < summary.graphs.size(); ++g) {
      const auto& graph_result = summary.graphs[g];
      if (!graph_result.outcome) continue;
      const AttackOutcome& o = *graph_result.outcome;
      ++out.audit.graphs_attacked;
      out.audit.records += o.records.size();
      out.audit.max_queries_seen = std::max(out.audit.max_queries_seen, o.queries_used);
      for (const auto& rec : o.records) {
        out.audit.max_flips_seen = std::max(out.audit.max_flips_seen, rec.flips.size());
      }
      auto problems = audit_outcome(rep.test.graph(g), o, cfg.max_queries);
      if (o.queries_used > cfg.max_queries) problems.push_back("queries exceed max_queries");
      for (auto& p : problems) {
        ++out.audit.violation_count;
        if (out.audit.violations.size() < 5) {
          out.audit.violations.push_back(ex.name + "/" + ex.methods[cell.method] + "/rep" +
                                         std::to_string(cell.rep) + "/" + graph_result.graph_id +
                                         ": " + p);
        }
      }
    }
  });

  for (std::size_t e = 0; e < spec.experiments.size(); ++e) {
    const auto& ex = spec.experiments[e];
    ExperimentResult er;
    er.spec = ex;
    er.table.methods = ex.methods;
    for (std::size_t c = 0; c < ex.r_values.size(); ++c) {
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        er.table.rows.push_back(r_label(ex.r_values[c]) + "/rep" + std::to_string(rep));
        er.table.cells.emplace_back(ex.methods.size(), 0.0);
      }
    }
    er.means.assign(ex.r_values.size(), std::vector<double>(ex.methods.size(), 0.0));
    result.experiments.push_back(std::move(er));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    auto& er = result.experiments[cell.experiment];
    er.table.cells[cell.config * spec.repetitions + cell.rep][cell.method] = outcomes[i].decline;
    er.means[cell.config][cell.method] +=
        outcomes[i].decline / static_cast<double>(spec.repetitions);

    const AuditTotals& a = outcomes[i].audit;
    AuditTotals& total = result.audit;
    total.runs += a.runs;
    total.graphs_attacked += a.graphs_attacked;
    total.records += a.records;
    total.max_queries_seen = std::max(total.max_queries_seen, a.max_queries_seen);
    total.max_flips_seen = std::max(total.max_flips_seen, a.max_flips_seen);
    total.violation_count += a.violation_count;
    for (const auto& v : a.violations) {
      if (total.violations.size() < 20) total.violations.push_back(v);
    }
  }
  for (auto& er : result.experiments) {
    if (er.table.rows.size() >= 2 && er.table.methods.size() >= 2 &&
        er.table.methods.size() <= 10) {
      er.rank = friedman_nemenyi(er.table, spec.alpha);
    }
  }
  return result;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

void write_bench_outputs(const BenchSpec& spec, const BenchResult& result, const std::string& out_dir) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + root.string() + ": " + ec.message());

  const std::string config_text = spec.to_json().dump(2) + "\n";
  write_text(root / "config.json", config_text);
  nlohmann::ordered_json manifest;
  manifest["format"] = "bench-v1";
  manifest["seed"] = spec.seed;
  manifest["config_hash"] = GraphDigest{hash_string(config_text), mix_seed(hash_string(config_text), 1)}.hex();
  manifest["experiments"] = nlohmann::ordered_json::array();
  for (const auto& e : spec.experiments) manifest["experiments"].push_back(e.name);
  write_text(root / "manifest.json", manifest.dump(2) + "\n");

  {
    std::ostringstream csv;
    csv << "repetition,seed,train_accuracy,test_accuracy,support_vectors\n";
    for (std::size_t r = 0; r < result.repetitions.size(); ++r) {
      const auto& info = result.repetitions[r];
      csv << r << ',' << info.seed << ',' << format_number(info.metrics.train_accuracy) << ','
          << format_number(info.metrics.test_accuracy) << ',' << info.metrics.support_vectors << '\n';
    }
    write_text(root / "repetitions.csv", csv.str());
  }

  {
    nlohmann::ordered_json audit;
    audit["runs"] = result.audit.runs;
    audit["graphs_attacked"] = result.audit.graphs_attacked;
    audit["records"] = result.audit.records;
    audit["max_queries"] = spec.attack.max_queries;
    audit["max_queries_seen"] = result.audit.max_queries_seen;
    audit["max_flips_seen"] = result.audit.max_flips_seen;
    audit["violation_count"] = result.audit.violation_count;
    audit["violations"] = result.audit.violations;
    write_text(root / "audit.json", audit.dump(2) + "\n");
  }

  for (const auto& er : result.experiments) {
    const fs::path dir = root / er.spec.name;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    std::ostringstream table;
    write_table_csv(er.table, table);
    write_text(dir / "table.csv", table.str());

    // Rows are configs plus their average, columns are methods.
    std::ostringstream means;
    means << "config";
    for (const auto& m : er.spec.methods) means << ',' << m;
    means << '\n';
    std::vector<double> average(er.spec.methods.size(), 0.0);
    for (std::size_t c = 0; c < er.means.size(); ++c) {
      means << r_label(er.spec.r_values[c]);
      for (std::size_t m = 0; m < er.means[c].size(); ++m) {
        means << ',' << format_number(er.means[c][m]);
        average[m] += er.means[c][m] / static_cast<double>(er.means.size());
      }
      means << '\n';
    }
    means << "average";
    for (double v : average) means << ',' << format_number(v);
    means << '\n';
    write_text(dir / "means.csv", means.str());

    // Budget sweep: methods by r.
    std::ostringstream budget;
    budget << "method";
    for (double r : er.spec.r_values) budget << ',' << r_label(r);
    budget << '\n';
    for (std::size_t m = 0; m < er.spec.methods.size(); ++m) {
      budget << er.spec.methods[m];
      for (std::size_t c = 0; c < er.means.size(); ++c) budget << ',' << format_number(er.means[c][m]);
      budget << '\n';
    }
    write_text(dir / "budget.csv", budget.str());

    if (er.rank) {
      write_text(dir / "rank.json", er.rank->to_json().dump(2) + "\n");
      std::ostringstream rank;
      write_rank_csv(*er.rank, rank);
      write_text(dir / "rank.csv", rank.str());
      write_text(dir / "cd.txt", cd_diagram(*er.rank));
    }
  }
}

}  // namespace advlcd
