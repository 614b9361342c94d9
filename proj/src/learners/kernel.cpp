#include <algorithm>
#include <cmath>

#include "advlcd/error.hpp"
#include "advlcd/learners.hpp"
#include "advlcd/rng.hpp"

namespace advlcd {

const char* to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::PrecomputedWl: return "precomputed_wl";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(const std::string& text) {
  if (text == "rbf") return KernelKind::Rbf;
  if (text == "linear") return KernelKind::Linear;
  if (text == "polynomial") return KernelKind::Polynomial;
  if (text == "precomputed_wl") return KernelKind::PrecomputedWl;
  fail(ErrorCode::InvalidConfig, "unknown kernel kind \"" + text + "\"");
}

void KernelSpec::validate() const {
  if (kind == KernelKind::Rbf && !(std::isfinite(gamma) && gamma > 0.0)) {
    fail(ErrorCode::InvalidConfig, "rbf kernel needs a finite gamma > 0");
  }
  if (kind == KernelKind::Polynomial && degree < 1) {
    fail(ErrorCode::InvalidConfig, "polynomial kernel needs degree >= 1");
  }
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
  switch (spec.kind) {
    case KernelKind::Rbf: return std::exp(-spec.gamma * squared_distance(a, b));
    case KernelKind::Linear:
    case KernelKind::PrecomputedWl: return dot(a, b);
    case KernelKind::Polynomial: return std::pow(dot(a, b) + spec.coef0, spec.degree);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch, "kernel_eval: dimensions " + std::to_string(a.size()) +
                                           " and " + std::to_string(b.size()) + " differ");
  }
  double ab = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    dist += (a[i] - b[i]) * (a[i] - b[i]);
  }
  switch (spec.kind) {
    case KernelKind::Rbf: return std::exp(-spec.gamma * dist);
    case KernelKind::Linear:
    case KernelKind::PrecomputedWl: return ab;
    case KernelKind::Polynomial: return std::pow(ab + spec.coef0, spec.degree);
  }
  return 0.0;
}

double sigma_heuristic(std::span<const SparseVector> vectors, std::uint64_t seed) {
  const std::size_t n = vectors.size();
  if (n < 2) fail(ErrorCode::DegenerateData, "sigma heuristic needs at least 2 vectors");
  constexpr std::size_t kExactLimit = 512;

  // Welford over the pairwise distances.
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  auto push = [&](double d) {
    ++count;
    const double delta = d - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (d - mean);
  };
  if (n <= kExactLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) push(std::sqrt(squared_distance(vectors[i], vectors[j])));
    }
  } else {
    Rng rng(seed);
    for (std::size_t k = 0; k < kExactLimit * kExactLimit; ++k) {
      const std::size_t i = uniform_index(rng, n);
      std::size_t j = uniform_index(rng, n - 1);
      if (j >= i) ++j;
      push(std::sqrt(squared_distance(vectors[i], vectors[j])));
    }
  }
  const double sigma = std::sqrt(m2 / static_cast<double>(count));
  if (!(sigma > 1e-12 * std::max(1.0, mean))) {
    fail(ErrorCode::DegenerateData, "pairwise distances have zero spread; supply gamma explicitly");
  }
  return 1.0 / (2.0 * sigma * sigma);
}

}  // namespace advlcd
