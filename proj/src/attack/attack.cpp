#include "advlcd/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>
#include <variant>

#include "advlcd/error.hpp"
#include "advlcd/learners.hpp"
#include "advlcd/parallel.hpp"
#include "advlcd/rng.hpp"
#include "advlcd/wl.hpp"

namespace advlcd {

const char* to_string(SurrogateKind kind) noexcept {
  switch (kind) {
    case SurrogateKind::SvmRbf: return "svm_rbf";
    case SurrogateKind::SvmLinear: return "svm_linear";
    case SurrogateKind::SvmPoly: return "svm_poly";
    case SurrogateKind::NaiveBayes: return "naive_bayes";
  }
  return "unknown";
}

SurrogateKind parse_surrogate(const std::string& text) {
  if (text == "svm_rbf") return SurrogateKind::SvmRbf;
  if (text == "svm_linear") return SurrogateKind::SvmLinear;
  if (text == "svm_poly") return SurrogateKind::SvmPoly;
  if (text == "naive_bayes") return SurrogateKind::NaiveBayes;
  fail(ErrorCode::InvalidConfig, "unknown surrogate \"" + text + "\"");
}

void AttackConfig::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::InvalidConfig, "r must be finite and > 0");
  if (k_candidates < 1) fail(ErrorCode::InvalidConfig, "k_candidates must be >= 1");
  if (rounds < 1) fail(ErrorCode::InvalidConfig, "rounds must be >= 1");
  if (epochs < 1) fail(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (!(surrogate_c > 0.0)) fail(ErrorCode::InvalidConfig, "surrogate_c must be > 0");
}

nlohmann::ordered_json AttackConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["r"] = r;
  doc["strategy"] = to_string(strategy);
  doc["surrogate"] = to_string(surrogate);
  doc["max_queries"] = max_queries;
  doc["k_candidates"] = k_candidates;
  doc["rounds"] = rounds;
  doc["epochs"] = epochs;
  doc["wl_iterations"] = wl_iterations;
  doc["surrogate_c"] = surrogate_c;
  doc["fresh_plans_per_round"] = fresh_plans_per_round;
  doc["mutations_per_round"] = mutations_per_round;
  doc["seed"] = seed;
  doc["lambda"] = lambda;
  return doc;
}

AttackConfig AttackConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "attack config must be a JSON object");
  AttackConfig cfg;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      const auto& v = it.value();
      if (key == "r") cfg.r = v.get<double>();
      else if (key == "strategy") cfg.strategy = parse_strategy(v.get<std::string>());
      else if (key == "surrogate") cfg.surrogate = parse_surrogate(v.get<std::string>());
      else if (key == "max_queries") cfg.max_queries = v.get<std::size_t>();
      else if (key == "k_candidates") cfg.k_candidates = v.get<std::size_t>();
      else if (key == "rounds") cfg.rounds = v.get<std::size_t>();
      else if (key == "epochs") cfg.epochs = v.get<std::size_t>();
      else if (key == "wl_iterations") cfg.wl_iterations = v.get<std::size_t>();
      else if (key == "surrogate_c") cfg.surrogate_c = v.get<double>();
      else if (key == "fresh_plans_per_round") cfg.fresh_plans_per_round = v.get<std::size_t>();
      else if (key == "mutations_per_round") cfg.mutations_per_round = v.get<std::size_t>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "lambda") cfg.lambda = v.get<double>();
      else fail(ErrorCode::InvalidConfig, "attack config: unknown key \"" + key + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("attack config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<int> surrogate_labels(const std::vector<double>& losses) {
  if (losses.size() < 2) return {};
  std::vector<int> labels(losses.size(), -1);
  const bool any_flip = std::any_of(losses.begin(), losses.end(), [](double l) { return l > 0.5; });
  double threshold = 0.5;
  if (!any_flip) {
    std::vector<double> sorted = losses;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    threshold = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (losses[i] > threshold) {
      labels[i] = 1;
      ++positives;
    }
  }
  if (positives == 0 && !any_flip) {
    // Ties at the top: take everything at the median as positive.
    for (std::size_t i = 0; i < losses.size(); ++i) {
      if (losses[i] >= threshold) {
        labels[i] = 1;
        ++positives;
      }
    }
  }
  if (positives == 0 || positives == losses.size()) return {};
  return labels;
}

namespace {

class Surrogate {
 public:
  explicit Surrogate(TrainedSvm svm) : model_(std::move(svm)) {}
  explicit Surrogate(TrainedNaiveBayes nb) : model_(std::move(nb)) {}

  /// Estimated probability that the candidate is a high-loss perturbation.
  double score(const SparseVector& x) const {
    if (const auto* svm = std::get_if<TrainedSvm>(&model_)) return svm_predict(*svm, x).probability;
    return nb_predict(std::get<TrainedNaiveBayes>(model_), x).probability;
  }

 private:
  std::variant<TrainedSvm, TrainedNaiveBayes> model_;
};

std::optional<Surrogate> train_surrogate(const AttackConfig& cfg,
                                         const std::vector<SparseVector>& x,
                                         const std::vector<int>& labels, std::uint64_t seed,
                                         SurrogateDiagnostics& diag, std::size_t round) {
  const std::string where = "round " + std::to_string(round) + ": ";
  try {
    if (cfg.surrogate == SurrogateKind::NaiveBayes) return Surrogate(nb_train(x, labels));
    SvmOptions options;
    options.C = cfg.surrogate_c;
    options.max_passes = cfg.epochs;
    options.seed = seed;
    KernelSpec kernel;
    switch (cfg.surrogate) {
      case SurrogateKind::SvmLinear: kernel = KernelSpec::linear(); break;
      case SurrogateKind::SvmPoly: kernel = KernelSpec::polynomial(); break;
      default: {
        double gamma = 1.0;
        try {
          gamma = sigma_heuristic(x, seed);
        } catch (const Error& e) {
          diag.notes.push_back(where + "sigma heuristic degenerate, gamma=1");
        }
        kernel = KernelSpec::rbf(gamma);
      }
    }
    return Surrogate(svm_train(x, labels, kernel, options));
  } catch (const Error& e) {
    diag.notes.push_back(where + to_string(e.code()) + ": " + e.what());
    return std::nullopt;
  }
}

struct Candidate {
  std::vector<EdgeFlip> flips;
  LabeledGraph graph;
  GraphDigest digest;
};

Candidate make_candidate(const LabeledGraph& g, std::vector<EdgeFlip> flips) {
  std::sort(flips.begin(), flips.end(), [](const EdgeFlip& a, const EdgeFlip& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  LabeledGraph perturbed = apply_flips(g, flips);
  const GraphDigest digest = graph_hash(perturbed);
  return Candidate{std::move(flips), std::move(perturbed), digest};
}

bool has_pair(const std::vector<EdgeFlip>& flips, NodeId u, NodeId v) {
  return std::any_of(flips.begin(), flips.end(),
                     [&](const EdgeFlip& f) { return f.u == u && f.v == v; });
}

// Incumbent with one flip added, dropped, or swapped for a strategy pair.
std::vector<std::vector<EdgeFlip>> one_flip_mutations(const std::vector<EdgeFlip>& incumbent,
                                                      const std::vector<EdgeFlip>& pair_pool,
                                                      std::size_t beta) {
  std::vector<std::vector<EdgeFlip>> out;
  for (std::size_t j = 0; j < incumbent.size() && incumbent.size() > 1; ++j) {
    auto m = incumbent;
    m.erase(m.begin() + static_cast<std::ptrdiff_t>(j));
    out.push_back(std::move(m));
  }
  for (const auto& p : pair_pool) {
    if (has_pair(incumbent, p.u, p.v)) continue;
    if (incumbent.size() < beta) {
      auto m = incumbent;
      m.push_back(p);
      out.push_back(std::move(m));
    }
    for (std::size_t j = 0; j < incumbent.size(); ++j) {
      auto m = incumbent;
      m[j] = p;
      out.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace

AttackOutcome attack_one(QueryOracle& oracle, const LabeledGraph& g, ClassLabel y,
                         const AttackConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Budget budget(cfg.r, g.node_count());
  const std::size_t beta = budget.beta();

  AttackOutcome out{g, {}, 0.0, false, 0, beta, {}, {}};
  if (g.node_count() < 2) return out;

  Rng rng(seed);
  LabelDictionary dict;  // attacker-side, independent of the victim's
  std::unordered_set<GraphDigest, GraphDigestHash> seen;
  std::vector<SparseVector> features;
  std::vector<double> losses;
  std::size_t eigen_offset = 0;
  bool have_best = false;
  bool stop = false;

  auto fresh_plans = [&](std::size_t count) {
    std::vector<PerturbationPlan> plans;
    switch (cfg.strategy) {
      case Strategy::Eigencentrality:
        plans = plan_eigencentrality(g, budget, count, seed, eigen_offset);
        eigen_offset += plans.size();
        break;
      case Strategy::RandomWalk: plans = plan_random_walk(g, budget, count, rng); break;
      case Strategy::ShortestPath: plans = plan_shortest_path(g, budget, count, rng); break;
    }
    return plans;
  };

  auto query = [&](Candidate& c, std::size_t round) {
    if (oracle.remaining() == 0) {
      stop = true;
      return;
    }
    Observation observed;
    try {
      observed = oracle.query(c.graph);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::QueryBudgetExhausted) throw;
      stop = true;
      return;
    }
    seen.insert(c.digest);
    AttackRecord record;
    record.digest = c.digest;
    record.flips = c.flips;
    record.observed = observed;
    record.loss = attack_loss(observed, y);
    record.success = attack_succeeded(observed, y);
    record.query_index = out.records.size();
    record.round = round;
    features.push_back(wl_feature_vector(c.graph, cfg.wl_iterations, dict).to_sparse());
    losses.push_back(record.loss);
    if (!have_best || record.loss > out.best_loss) {
      have_best = true;
      out.best_loss = record.loss;
      out.best_graph = c.graph;
      out.best_flips = c.flips;
    }
    if (record.success) {
      out.success = true;
      stop = true;
    }
    out.records.push_back(std::move(record));
  };

  // Round 0: strategy only.
  for (auto& plan : fresh_plans(cfg.k_candidates)) {
    if (stop) break;
    Candidate c = make_candidate(g, std::move(plan.flips));
    if (seen.count(c.digest)) continue;
    query(c, 0);
  }

  for (std::size_t round = 1; round < cfg.rounds && !stop; ++round) {
    if (oracle.remaining() == 0) break;

    std::vector<Candidate> pool;
    std::unordered_set<GraphDigest, GraphDigestHash> pooled;
    auto offer = [&](std::vector<EdgeFlip> flips) {
      Candidate c = make_candidate(g, std::move(flips));
      if (seen.count(c.digest) || !pooled.insert(c.digest).second) return;
      pool.push_back(std::move(c));
    };

    auto plans = fresh_plans(cfg.fresh_plans_per_round);
    std::vector<EdgeFlip> pair_pool;
    for (const auto& plan : plans) {
      for (const auto& f : plan.flips) {
        if (!has_pair(pair_pool, f.u, f.v)) pair_pool.push_back(f);
      }
    }
    for (auto& plan : plans) offer(std::move(plan.flips));
    if (have_best) {
      auto mutations = one_flip_mutations(out.best_flips, pair_pool, beta);
      if (mutations.size() > cfg.mutations_per_round) {
        std::shuffle(mutations.begin(), mutations.end(), rng);
        mutations.resize(cfg.mutations_per_round);
      }
      for (auto& m : mutations) offer(std::move(m));
    }
    if (pool.empty()) continue;

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    const auto labels = surrogate_labels(losses);
    std::optional<Surrogate> surrogate;
    if (labels.empty()) {
      out.diagnostics.notes.push_back("round " + std::to_string(round) +
                                      ": single-class surrogate labels");
    } else {
      surrogate = train_surrogate(cfg, features, labels, mix_seed(seed, round), out.diagnostics,
                                  round);
    }
    if (surrogate) {
      ++out.diagnostics.rounds_trained;
      std::vector<double> scores(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        scores[i] = surrogate->score(
            wl_feature_vector(pool[i].graph, cfg.wl_iterations, dict).to_sparse());
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    } else {
      ++out.diagnostics.fallbacks;
    }

    const std::size_t take = std::min(cfg.k_candidates, pool.size());
    for (std::size_t i = 0; i < take && !stop; ++i) query(pool[order[i]], round);
  }

  out.queries_used = out.records.size();
  return out;
}

std::vector<std::string> audit_outcome(const LabeledGraph& original, const AttackOutcome& outcome,
                                       std::size_t max_queries) {
  std::vector<std::string> problems;
  if (outcome.records.size() > max_queries) {
    problems.push_back("records exceed the query budget");
  }
  std::set<GraphDigest> digests;
  for (std::size_t i = 0; i < outcome.records.size(); ++i) {
    const auto& rec = outcome.records[i];
    const std::string where = "record " + std::to_string(i) + ": ";
    if (rec.query_index != i) problems.push_back(where + "query index out of sequence");
    if (rec.flips.size() > outcome.beta) problems.push_back(where + "more flips than beta");
    for (std::size_t a = 0; a < rec.flips.size(); ++a) {
      for (std::size_t b = a + 1; b < rec.flips.size(); ++b) {
        if (rec.flips[a].same_pair(rec.flips[b])) problems.push_back(where + "repeated pair");
      }
    }
    try {
      const LabeledGraph replay = apply_flips(original, rec.flips);
      if (graph_hash(replay) != rec.digest) problems.push_back(where + "digest mismatch");
      if (edge_symmetric_difference(original, replay) > outcome.beta) {
        problems.push_back(where + "graph differs from original by more than beta edges");
      }
    } catch (const Error& e) {
      problems.push_back(where + e.what());
    }
    if (!digests.insert(rec.digest).second) problems.push_back(where + "duplicate query");
    if (rec.loss < 0.0 || rec.loss > 1.0) problems.push_back(where + "loss out of [0,1]");
    if (rec.success != (rec.loss > 0.5)) problems.push_back(where + "success flag disagrees with loss");
  }
  return problems;
}

AttackSummary attack_testset(const TargetService& target, const GraphDataset& test,
                             const AttackConfig& cfg, std::size_t workers) {
  cfg.validate();
  AttackSummary summary;
  summary.config = cfg;
  summary.graphs.resize(test.size());

  parallel_for(test.size(), workers, [&](std::size_t i) {
    const LabeledGraph& g = test.graph(i);
    GraphAttackResult& result = summary.graphs[i];
    result.graph_id = g.id();
    result.y = test.label(i);
    // Clean evaluation runs on its own session, outside the attacker's budget.
    result.clean_label = target.open_session(1)->query(g).label;
    result.clean_correct = result.clean_label == result.y;
    result.attacked_correct = result.clean_correct;
    if (!result.clean_correct) return;
    result.attacked = true;
    auto session = target.open_session(cfg.max_queries);
    const std::uint64_t seed = mix_seed(cfg.seed, hash_string(g.id()));
    result.outcome = attack_one(*session, g, result.y, cfg, seed);
    result.outcome->queries_used = session->queries_used();
    result.attacked_correct = !result.outcome->success;
  });

  for (const auto& r : summary.graphs) {
    summary.clean_correct += r.clean_correct ? 1 : 0;
    summary.attacked_correct += r.attacked_correct ? 1 : 0;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, test.size()));
  summary.clean_accuracy = static_cast<double>(summary.clean_correct) / n;
  summary.attacked_accuracy = static_cast<double>(summary.attacked_correct) / n;
  summary.decline_pp = test.size() == 0
                           ? 0.0
                           : 100.0 *
                                 (static_cast<double>(summary.attacked_correct) -
                                  static_cast<double>(summary.clean_correct)) /
                                 n;
  return summary;
}

namespace {

nlohmann::ordered_json flips_json(const std::vector<EdgeFlip>& flips) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : flips) {
    arr.push_back(nlohmann::ordered_json::array({f.u, f.v, to_string(f.kind)}));
  }
  return arr;
}

}  // namespace

nlohmann::ordered_json AttackSummary::to_json(bool include_records) const {
  nlohmann::ordered_json doc;
  doc["format"] = "attack-summary-v1";
  doc["config"] = config.to_json();
  doc["seed"] = config.seed;
  doc["graphs_total"] = graphs.size();
  doc["clean_correct"] = clean_correct;
  doc["attacked_correct"] = attacked_correct;
  doc["clean_accuracy"] = clean_accuracy;
  doc["attacked_accuracy"] = attacked_accuracy;
  doc["decline_pp"] = decline_pp;
  nlohmann::ordered_json per_graph = nlohmann::ordered_json::array();
  for (const auto& r : graphs) {
    nlohmann::ordered_json gj;
    gj["id"] = r.graph_id;
    gj["y"] = sign_of(r.y);
    gj["clean_label"] = sign_of(r.clean_label);
    gj["clean_correct"] = r.clean_correct;
    gj["attacked"] = r.attacked;
    gj["attacked_correct"] = r.attacked_correct;
    if (r.outcome) {
      const auto& o = *r.outcome;
      gj["success"] = o.success;
      gj["beta"] = o.beta;
      gj["queries"] = o.queries_used;
      gj["best_loss"] = o.best_loss;
      gj["best_flips"] = flips_json(o.best_flips);
      gj["surrogate_rounds"] = o.diagnostics.rounds_trained;
      gj["surrogate_fallbacks"] = o.diagnostics.fallbacks;
      if (include_records) {
        nlohmann::ordered_json recs = nlohmann::ordered_json::array();
        for (const auto& rec : o.records) {
          nlohmann::ordered_json rj;
          rj["query"] = rec.query_index;
          rj["round"] = rec.round;
          rj["digest"] = rec.digest.hex();
          rj["flips"] = flips_json(rec.flips);
          rj["label"] = sign_of(rec.observed.label);
          rj["confidence"] = rec.observed.confidence;
          rj["loss"] = rec.loss;
          rj["success"] = rec.success;
          recs.push_back(std::move(rj));
        }
        gj["records"] = std::move(recs);
      }
    }
    per_graph.push_back(std::move(gj));
  }
  doc["graphs"] = std::move(per_graph);
  return doc;
}

}  // namespace advlcd
