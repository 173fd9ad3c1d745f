#pragma once

#include <Eigen/Dense>

#include "fairkr/rng.hpp"

namespace testutil {

using fairkr::Index;
using fairkr::Matrix;
using fairkr::Vector;

inline Matrix random_matrix(fairkr::rng::Engine& eng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = eng.normal();
  return m;
}

inline Vector random_vector(fairkr::rng::Engine& eng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = eng.normal();
  return v;
}

// Random SPD matrix B B^T + ridge I (exactly symmetric).
inline Matrix random_spd(fairkr::rng::Engine& eng, Index n,
                         double ridge = 0.1) {
  const Matrix b = random_matrix(eng, n, n);
  Matrix a = b * b.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  a.diagonal().array() += ridge;
  return a;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace testutil
