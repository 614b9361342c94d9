#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "advlcd/sparse.hpp"

namespace advlcd {

enum class KernelKind : std::uint8_t { Rbf, Linear, Polynomial, PrecomputedWl };

const char* to_string(KernelKind kind) noexcept;
KernelKind parse_kernel_kind(const std::string& text);

/// `PrecomputedWl` is the inner product of WL histograms, i.e. a linear
/// kernel over WL feature vectors; it is tagged separately so persisted
/// target models record what they were trained on.
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;
  int degree = 3;
  double coef0 = 1.0;

  static KernelSpec rbf(double gamma) { return {KernelKind::Rbf, gamma, 3, 1.0}; }
  static KernelSpec linear() { return {KernelKind::Linear, 1.0, 3, 1.0}; }
  static KernelSpec polynomial(int degree = 3, double coef0 = 1.0) {
    return {KernelKind::Polynomial, 1.0, degree, coef0};
  }
  static KernelSpec wl() { return {KernelKind::PrecomputedWl, 1.0, 3, 1.0}; }

  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);
/// Dense form; throws ErrorCode::DimensionMismatch on unequal lengths.
double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

/// gamma = 1 / (2 sigma^2) with sigma the population standard deviation of
/// pairwise Euclidean distances (all pairs for N <= 512, otherwise 512^2
/// pairs drawn with `seed`). Throws DegenerateData when sigma is 0.
double sigma_heuristic(std::span<const SparseVector> vectors, std::uint64_t seed = 42);

/// Per-step snapshot handed to an optional observer during SMO.
struct SmoStep {
  std::size_t step = 0;
  double dual_objective = 0.0;
  double equality_residual = 0.0;  ///< sum(alpha_i y_i)
  double min_alpha = 0.0;
  double max_alpha = 0.0;
};

struct SvmOptions {
  double C = 1.0;  ///< +infinity gives the hard-margin problem
  double tol = 1e-3;
  std::size_t max_passes = 10000;
  std::uint64_t seed = 42;
  std::function<void(const SmoStep&)> observer;
};

struct TrainedSvm {
  KernelSpec kernel;
  double C = 1.0;
  double bias = 0.0;
  std::vector<SparseVector> support_vectors;
  std::vector<double> alpha;
  std::vector<int> labels;
  double platt_a = 0.0;
  double platt_b = 0.0;

  /// sum_i alpha_i y_i K(sv_i, x) + b
  double decision(const SparseVector& x) const;
  friend bool operator==(const TrainedSvm&, const TrainedSvm&) = default;
};

struct SvmTrainReport {
  std::vector<double> alpha;  ///< one per training example
  std::size_t passes = 0;
  std::size_t steps = 0;
  double dual_objective = 0.0;
  double max_kkt_violation = 0.0;
};

/// Soft-margin SVM by sequential minimal optimization on the dual, followed
/// by Platt calibration of the decision values. Labels must be +1/-1 with
/// both classes present (DegenerateLabels otherwise). Throws DidNotConverge
/// if KKT conditions still fail after `max_passes` sweeps.
TrainedSvm svm_train(std::span<const SparseVector> x, std::span<const int> y,
                     const KernelSpec& kernel, const SvmOptions& options = {},
                     SvmTrainReport* report = nullptr);

struct Prediction {
  int label = 1;
  double probability = 0.5;  ///< P(y = +1)
  double margin = 0.0;
};

Prediction svm_predict(const TrainedSvm& model, const SparseVector& x);

/// max over i of the KKT violation of alpha_i given decision values f_i.
double kkt_violation(std::span<const double> alpha, std::span<const int> y,
                     std::span<const double> decision, double C);

/// W(alpha) = sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double dual_objective(std::span<const double> alpha, std::span<const int> y,
                      const DenseMatrix& gram);

/// Platt sigmoid fit: returns (A, B) with P(+1|f) = 1 / (1 + exp(A f + B)).
std::pair<double, double> fit_platt(std::span<const double> decision, std::span<const int> y);

struct TrainedNaiveBayes {
  std::vector<std::uint32_t> features;  ///< sparse index of each dense column
  std::vector<double> mean_pos, var_pos, mean_neg, var_neg;
  double prior_pos = 0.5;
  double prior_neg = 0.5;
  double smoothing = 1e-9;
  double epsilon = 0.0;  ///< variance floor actually added

  friend bool operator==(const TrainedNaiveBayes&, const TrainedNaiveBayes&) = default;
};

/// Gaussian naive Bayes with diagonal per-class covariances. Every variance
/// is increased by smoothing * max(1, largest feature variance).
TrainedNaiveBayes nb_train(std::span<const SparseVector> x, std::span<const int> y,
                           double smoothing = 1e-9);
Prediction nb_predict(const TrainedNaiveBayes& model, const SparseVector& x);

}  // namespace advlcd
