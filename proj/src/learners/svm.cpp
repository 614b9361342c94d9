#include <algorithm>
#include <cmath>
#include <limits>

#include "advlcd/error.hpp"
#include "advlcd/learners.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

namespace {

void check_labels(std::span<const SparseVector> x, std::span<const int> y) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "features and labels differ in length");
  bool pos = false, neg = false;
  for (int yi : y) {
    if (yi == 1) {
      pos = true;
    } else if (yi == -1) {
      neg = true;
    } else {
      fail(ErrorCode::DegenerateLabels, "labels must be +1 or -1");
    }
  }
  if (!pos || !neg) fail(ErrorCode::DegenerateLabels, "training data needs both classes");
}

// Platt's SMO over a precomputed Gram matrix. Decision convention:
// f(x) = sum alpha_j y_j K(x_j, x) + b, error E_i = f(x_i) - y_i.
class Smo {
 public:
  Smo(const DenseMatrix& gram, std::span<const int> y, const SvmOptions& options)
      : k_(gram), y_(y), c_(options.C), tol_(options.tol), options_(options),
        alpha_(y.size(), 0.0), error_(y.size()), rng_(options.seed) {
    for (std::size_t i = 0; i < y.size(); ++i) error_[i] = -y_[i];
  }

  void run() {
    bool examine_all = true;
    std::size_t changed = 0;
    while (changed > 0 || examine_all) {
      if (passes_ >= options_.max_passes) {
        fail(ErrorCode::DidNotConverge,
             "SMO: KKT conditions still violated after " + std::to_string(passes_) + " passes");
      }
      ++passes_;
      changed = 0;
      for (std::size_t i = 0; i < y_.size(); ++i) {
        if (examine_all || non_bound(i)) changed += examine(i);
      }
      if (examine_all) {
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return b_; }
  std::size_t passes() const { return passes_; }
  std::size_t steps() const { return steps_; }

 private:
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  // Multipliers within rounding of a bound sit on it; otherwise one ulp below
  // C counts as free and can never be moved the rest of the way.
  double snap(double a) const {
    const double eps = 1e-12 * (std::isfinite(c_) ? std::max(1.0, c_) : 1.0);
    if (a < eps) return 0.0;
    if (std::isfinite(c_) && a > c_ - eps) return c_;
    return a;
  }

  std::size_t examine(std::size_t i2) {
    const double r2 = error_[i2] * y_[i2];
    const bool violates = (r2 < -tol_ && alpha_[i2] < c_) || (r2 > tol_ && alpha_[i2] > 0.0);
    if (!violates) return 0;

    const std::size_t n = y_.size();
    // Second choice: maximal |E1 - E2| among non-bound multipliers.
    std::size_t best = n;
    double best_gap = -1.0;
    std::size_t non_bound_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!non_bound(i)) continue;
      ++non_bound_count;
      const double gap = std::abs(error_[i] - error_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (non_bound_count > 1 && best < n && take_step(best, i2)) return 1;

    // Stalled: sweep non-bound, then all, from a random start.
    const std::size_t start = uniform_index(rng_, n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i1 = (start + k) % n;
      if (non_bound(i1) && take_step(i1, i2)) return 1;
    }
    const std::size_t start2 = uniform_index(rng_, n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i1 = (start2 + k) % n;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha_[i1];
    const double a2_old = alpha_[i2];
    const int y1 = y_[i1];
    const int y2 = y_[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(c_, c_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - c_);
      hi = std::min(c_, a1_old + a2_old);
    }
    if (!(hi - lo > 1e-15 * std::max(1.0, std::abs(hi)))) return false;

    const double k11 = k_(i1, i1);
    const double k12 = k_(i1, i2);
    const double k22 = k_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      if (!std::isfinite(hi)) return false;
      // Objective restricted to the segment is linear; take the better end.
      const double lobj = segment_objective(i1, i2, lo);
      const double hobj = segment_objective(i1, i2, hi);
      if (lobj > hobj + 1e-12) {
        a2 = lo;
      } else if (hobj > lobj + 1e-12) {
        a2 = hi;
      } else {
        return false;
      }
    }
    a2 = snap(a2);
    constexpr double kEps = 1e-12;
    if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;

    double a1 = snap(a1_old + s * (a2_old - a2));

    const double d1 = y1 * (a1 - a1_old);
    const double d2 = y2 * (a2 - a2_old);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1 > 0.0 && a1 < c_) {
      b_new = b1;
    } else if (a2 > 0.0 && a2 < c_) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - b_;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      error_[i] += d1 * k_(i, i1) + d2 * k_(i, i2) + db;
    }
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    b_ = b_new;
    ++steps_;
    if (options_.observer) notify();
    return true;
  }

  // Dual objective with alpha_2 = a2 and alpha_1 moved along the constraint.
  double segment_objective(std::size_t i1, std::size_t i2, double a2) const {
    std::vector<double> trial = alpha_;
    trial[i1] = alpha_[i1] + y_[i1] * y_[i2] * (alpha_[i2] - a2);
    trial[i2] = a2;
    return dual_objective(trial, y_, k_);
  }

  void notify() const {
    SmoStep step;
    step.step = steps_;
    step.dual_objective = dual_objective(alpha_, y_, k_);
    double eq = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) eq += alpha_[i] * y_[i];
    step.equality_residual = eq;
    step.min_alpha = *std::min_element(alpha_.begin(), alpha_.end());
    step.max_alpha = *std::max_element(alpha_.begin(), alpha_.end());
    options_.observer(step);
  }

  const DenseMatrix& k_;
  std::span<const int> y_;
  double c_;
  double tol_;
  const SvmOptions& options_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double b_ = 0.0;
  Rng rng_;
  std::size_t passes_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace

double dual_objective(std::span<const double> alpha, std::span<const int> y,
                      const DenseMatrix& gram) {
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      quad += alpha[i] * alpha[j] * y[i] * y[j] * gram(i, j);
    }
  }
  return linear - 0.5 * quad;
}

double kkt_violation(std::span<const double> alpha, std::span<const int> y,
                     std::span<const double> decision, double C) {
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double m = y[i] * decision[i];
    double v = 0.0;
    if (alpha[i] <= 0.0) {
      v = std::max(0.0, 1.0 - m);
    } else if (alpha[i] >= C) {
      v = std::max(0.0, m - 1.0);
    } else {
      v = std::abs(m - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

std::pair<double, double> fit_platt(std::span<const double> decision, std::span<const int> y) {
  const std::size_t n = decision.size();
  double prior1 = 0.0, prior0 = 0.0;
  for (int yi : y) (yi > 0 ? prior1 : prior0) += 1.0;

  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] > 0 ? hi_target : lo_target;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = decision[i] * a + b;
      f += fapb >= 0.0 ? t[i] * fapb + std::log1p(std::exp(-fapb))
                       : (t[i] - 1.0) * fapb + std::log1p(std::exp(fapb));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = decision[i] * a + b;
      double p, q;
      if (fapb >= 0.0) {
        p = std::exp(-fapb) / (1.0 + std::exp(-fapb));
        q = 1.0 / (1.0 + std::exp(-fapb));
      } else {
        p = 1.0 / (1.0 + std::exp(fapb));
        q = std::exp(fapb) / (1.0 + std::exp(fapb));
      }
      const double d2 = p * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      const double d1 = t[i] - p;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

double TrainedSvm::decision(const SparseVector& x) const {
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    f += alpha[i] * labels[i] * kernel_eval(kernel, support_vectors[i], x);
  }
  return f;
}

Prediction svm_predict(const TrainedSvm& model, const SparseVector& x) {
  Prediction p;
  p.margin = model.decision(x);
  p.label = p.margin >= 0.0 ? 1 : -1;
  const double z = model.platt_a * p.margin + model.platt_b;
  p.probability = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  return p;
}

TrainedSvm svm_train(std::span<const SparseVector> x, std::span<const int> y,
                     const KernelSpec& kernel, const SvmOptions& options,
                     SvmTrainReport* report) {
  check_labels(x, y);
  kernel.validate();
  if (!(options.C > 0.0)) fail(ErrorCode::InvalidConfig, "SVM box constraint C must be > 0");
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidConfig, "SVM tolerance must be > 0");

  const std::size_t n = x.size();
  DenseMatrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) gram(i, j) = gram(j, i) = kernel_eval(kernel, x[i], x[j]);
  }

  Smo smo(gram, y, options);
  smo.run();
  const auto& alpha = smo.alpha();

  TrainedSvm model;
  model.kernel = kernel;
  model.C = options.C;
  model.bias = smo.bias();
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) {
      model.support_vectors.push_back(x[i]);
      model.alpha.push_back(alpha[i]);
      model.labels.push_back(y[i]);
    }
  }

  std::vector<double> decision(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = model.bias;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] > 0.0) f += alpha[j] * y[j] * gram(j, i);
    }
    decision[i] = f;
  }
  std::tie(model.platt_a, model.platt_b) = fit_platt(decision, y);

  if (report) {
    report->alpha = alpha;
    report->passes = smo.passes();
    report->steps = smo.steps();
    report->dual_objective = dual_objective(alpha, y, gram);
    report->max_kkt_violation = kkt_violation(alpha, y, decision, options.C);
  }
  return model;
}

}  // namespace advlcd
