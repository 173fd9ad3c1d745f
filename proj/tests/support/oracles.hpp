#pragma once

// Independent reference implementations used as test oracles. Nothing here
// may call into the library paths it is checking: the linear solver is plain
// Gaussian elimination, the ridge oracle is gradient descent, and the
// eigenvalue oracle is random search over the constraint set.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "support/testutil.hpp"

namespace oracles {

using fairkr::Index;
using fairkr::Matrix;
using fairkr::Vector;

// Gaussian elimination with partial pivoting.
inline Vector gauss_solve(Matrix a, Vector b) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("gauss_solve: shape mismatch");
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0)
      throw std::runtime_error("gauss_solve: singular matrix");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b[pivot], b[col]);
    }
    for (Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      a.row(r).tail(n - col) -= f * a.row(col).tail(n - col);
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (Index r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (Index c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

// Ridge regression |X b - y|^2 + gamma |b|^2 by plain gradient descent with
// a step below 1/L, run to a tight gradient norm.
inline Vector gd_ridge(const Matrix& x, const Vector& y, double gamma,
                       int max_iters = 2000000, double grad_tol = 1e-12) {
  const Matrix xtx = x.transpose() * x;
  const Vector xty = x.transpose() * y;
  // Frobenius norm bounds the spectral norm, so this step is safely < 1/L.
  const double lipschitz = 2.0 * (xtx.norm() + gamma);
  const double step = 0.9 / lipschitz;
  Vector beta = Vector::Zero(x.cols());
  for (int it = 0; it < max_iters; ++it) {
    const Vector grad = 2.0 * (xtx * beta - xty) + 2.0 * gamma * beta;
    if (grad.norm() <= grad_tol * (1.0 + xty.norm())) break;
    beta -= step * grad;
  }
  return beta;
}

// Standard kernel ridge regression dual coefficients c = (K + lambda I)^-1 y
// via Gaussian elimination.
inline Vector kernel_ridge(const Matrix& k, const Vector& y, double lambda) {
  Matrix sys = k;
  sys.diagonal().array() += lambda;
  return gauss_solve(std::move(sys), y);
}

// Minimum of v^T M v over `count` random vectors normalized to
// v^T metric v = 1. Draws come from the provided engine.
inline double random_search_min_quadratic(const Matrix& m, const Matrix& metric,
                                          long count,
                                          fairkr::rng::Engine& eng) {
  const Index n = m.rows();
  double best = std::numeric_limits<double>::infinity();
  constexpr Index kBatch = 512;
  Matrix w(n, kBatch);
  long done = 0;
  while (done < count) {
    const Index batch = static_cast<Index>(std::min<long>(kBatch, count - done));
    for (Index j = 0; j < batch; ++j)
      for (Index i = 0; i < n; ++i) w(i, j) = eng.normal();
    const Matrix mw = m * w.leftCols(batch);
    const Matrix kw = metric * w.leftCols(batch);
    for (Index j = 0; j < batch; ++j) {
      const double knorm = w.col(j).dot(kw.col(j));
      if (knorm <= 0.0) continue;
      const double q = w.col(j).dot(mw.col(j)) / knorm;
      if (q < best) best = q;
    }
    done += batch;
  }
  return best;
}

}  // namespace oracles
