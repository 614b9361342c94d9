#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace advlcd {

/// Sparse real vector with strictly increasing indices. Feature vectors from
/// different graphs align through shared label ids, so there is no fixed
/// dimension: a missing index is a zero.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const noexcept { return index.size(); }
  /// Appends (i, x); i must exceed every stored index.
  void push_back(std::uint32_t i, double x);
  /// Builds from unsorted pairs, summing duplicates and dropping zeros.
  static SparseVector from_pairs(std::vector<std::pair<std::uint32_t, double>> pairs);
  std::vector<double> to_dense(std::size_t dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

double dot(const SparseVector& a, const SparseVector& b);
double squared_norm(const SparseVector& a);
double squared_distance(const SparseVector& a, const SparseVector& b);

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

}  // namespace advlcd
