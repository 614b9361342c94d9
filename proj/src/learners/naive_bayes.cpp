#include <algorithm>
#include <cmath>
#include <numbers>

#include "advlcd/error.hpp"
#include "advlcd/learners.hpp"

namespace advlcd {

namespace {

double column_value(const SparseVector& x, std::uint32_t feature) {
  auto it = std::lower_bound(x.index.begin(), x.index.end(), feature);
  if (it == x.index.end() || *it != feature) return 0.0;
  return x.value[static_cast<std::size_t>(it - x.index.begin())];
}

}  // namespace

TrainedNaiveBayes nb_train(std::span<const SparseVector> x, std::span<const int> y,
                           double smoothing) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "features and labels differ in length");
  if (!(smoothing > 0.0)) fail(ErrorCode::InvalidConfig, "naive Bayes smoothing must be > 0");
  std::size_t n_pos = 0, n_neg = 0;
  for (int yi : y) {
    if (yi == 1) {
      ++n_pos;
    } else if (yi == -1) {
      ++n_neg;
    } else {
      fail(ErrorCode::DegenerateLabels, "labels must be +1 or -1");
    }
  }
  if (n_pos == 0 || n_neg == 0) fail(ErrorCode::DegenerateLabels, "training data needs both classes");

  TrainedNaiveBayes model;
  model.smoothing = smoothing;
  std::vector<std::uint32_t> features;
  for (const auto& v : x) features.insert(features.end(), v.index.begin(), v.index.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  model.features = features;

  const std::size_t d = features.size();
  std::vector<std::vector<double>> dense(x.size(), std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < x[i].nnz(); ++k) {
      const auto col = std::lower_bound(features.begin(), features.end(), x[i].index[k]) - features.begin();
      dense[i][static_cast<std::size_t>(col)] = x[i].value[k];
    }
  }

  auto moments = [&](int cls, std::size_t count, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(d, 0.0);
    var.assign(d, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (y[i] != cls) continue;
      for (std::size_t j = 0; j < d; ++j) mean[j] += dense[i][j];
    }
    for (double& m : mean) m /= static_cast<double>(count);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (y[i] != cls) continue;
      for (std::size_t j = 0; j < d; ++j) var[j] += (dense[i][j] - mean[j]) * (dense[i][j] - mean[j]);
    }
    for (double& v : var) v /= static_cast<double>(count);
  };
  moments(1, n_pos, model.mean_pos, model.var_pos);
  moments(-1, n_neg, model.mean_neg, model.var_neg);

  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : dense) mean += row[j];
    mean /= static_cast<double>(x.size());
    for (const auto& row : dense) var += (row[j] - mean) * (row[j] - mean);
    max_var = std::max(max_var, var / static_cast<double>(x.size()));
  }
  model.epsilon = smoothing * std::max(1.0, max_var);
  for (double& v : model.var_pos) v += model.epsilon;
  for (double& v : model.var_neg) v += model.epsilon;

  model.prior_pos = static_cast<double>(n_pos) / static_cast<double>(x.size());
  model.prior_neg = static_cast<double>(n_neg) / static_cast<double>(x.size());
  return model;
}

Prediction nb_predict(const TrainedNaiveBayes& model, const SparseVector& x) {
  double lp_pos = std::log(model.prior_pos);
  double lp_neg = std::log(model.prior_neg);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    const double v = column_value(x, model.features[j]);
    const double dp = v - model.mean_pos[j];
    const double dn = v - model.mean_neg[j];
    lp_pos += -0.5 * (log_2pi + std::log(model.var_pos[j])) - dp * dp / (2.0 * model.var_pos[j]);
    lp_neg += -0.5 * (log_2pi + std::log(model.var_neg[j])) - dn * dn / (2.0 * model.var_neg[j]);
  }
  Prediction p;
  p.margin = lp_pos - lp_neg;
  p.label = p.margin >= 0.0 ? 1 : -1;
  p.probability = p.margin >= 0.0 ? 1.0 / (1.0 + std::exp(-p.margin))
                                  : std::exp(p.margin) / (1.0 + std::exp(p.margin));
  return p;
}

}  // namespace advlcd
