#include "advlcd/sparse.hpp"

#include <algorithm>
#include <cassert>

namespace advlcd {

void SparseVector::push_back(std::uint32_t i, double x) {
  assert(index.empty() || index.back() < i);
  index.push_back(i);
  value.push_back(x);
}

SparseVector SparseVector::from_pairs(std::vector<std::pair<std::uint32_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  for (std::size_t i = 0; i < pairs.size();) {
    double sum = 0.0;
    const std::uint32_t idx = pairs[i].first;
    for (; i < pairs.size() && pairs[i].first == idx; ++i) sum += pairs[i].second;
    if (sum != 0.0) out.push_back(idx, sum);
  }
  return out;
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] < dim) out[index[k]] = value[k];
  }
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.index.size() && j < b.index.size()) {
    if (a.index[i] < b.index[j]) {
      ++i;
    } else if (b.index[j] < a.index[i]) {
      ++j;
    } else {
      acc += a.value[i++] * b.value[j++];
    }
  }
  return acc;
}

double squared_norm(const SparseVector& a) {
  double acc = 0.0;
  for (double x : a.value) acc += x * x;
  return acc;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.index.size() || j < b.index.size()) {
    double d;
    if (j == b.index.size() || (i < a.index.size() && a.index[i] < b.index[j])) {
      d = a.value[i++];
    } else if (i == a.index.size() || b.index[j] < a.index[i]) {
      d = b.value[j++];
    } else {
      d = a.value[i++] - b.value[j++];
    }
    acc += d * d;
  }
  return acc;
}

}  // namespace advlcd
