#pragma once

// Helpers shared by the test programs.

#include "qcr/linalg.hpp"
#include "qcr/rng.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace qcr::testing {

inline Matrix random_matrix(std::ptrdiff_t rows, std::ptrdiff_t cols, std::uint64_t seed) {
  CounterRng rng(hash_words({seed, 0x7e57}));
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
  return M;
}

inline Matrix random_orthonormal(std::ptrdiff_t n, std::ptrdiff_t r, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, r, seed));
  return qr.householderQ() * Matrix::Identity(n, r);
}

inline TangentSpace random_tangent(std::ptrdiff_t n, std::ptrdiff_t r, std::uint64_t seed) {
  return {random_orthonormal(n, r, seed), random_orthonormal(n, r, seed + 1)};
}

/// Exactly `count` distinct indices chosen uniformly.
inline SupportSet random_support(std::ptrdiff_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::ptrdiff_t> cells(static_cast<std::size_t>(n * n));
  std::iota(cells.begin(), cells.end(), 0);
  CounterRng rng(hash_words({seed, 0x5e7}));
  for (std::size_t k = cells.size(); k > 1; --k) {
    const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
    std::swap(cells[k - 1], cells[std::min(pick, k - 1)]);
  }
  SupportSet S(n);
  for (std::size_t k = 0; k < count; ++k) S.insert(cells[k] / n, cells[k] % n);
  return S;
}

/// Matrix of a linear map on n x n matrices in the column-major vec basis.
inline Matrix assemble_operator(std::ptrdiff_t n, const std::function<Matrix(const Matrix&)>& f) {
  const auto N = n * n;
  Matrix op(N, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    Matrix E = Matrix::Zero(n, n);
    E(k % n, k / n) = 1.0;
    const Matrix image = f(E);
    op.col(k) = Eigen::Map<const Eigen::VectorXd>(image.data(), N);
  }
  return op;
}

}  // namespace qcr::testing
