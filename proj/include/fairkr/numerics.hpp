#pragma once

#include <Eigen/Dense>

#include "fairkr/errors.hpp"

namespace fairkr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace numerics {

// Dense real symmetric matrix. Construction symmetrizes by averaging with the
// transpose (exact for already-symmetric input) and rejects NaN/Inf entries.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m);

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double operator()(Index i, Index j) const { return mat_(i, j); }
  double trace() const { return mat_.trace(); }

 private:
  Matrix mat_;
};

// Eigendecomposition result. values ascending, one column of `vectors` per
// value. Vectors are unit norm in the metric of the problem that produced
// them: Euclidean for sym_eigen, (K + jitter I)-norm for generalized_eigen.
// Sign convention: the entry of largest absolute value in each column is
// positive (first such entry on ties), so outputs are reproducible.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

// Scale-invariant default diagonal regularization for a PSD Gram matrix:
// 1e-8 * trace(K) / n (0 for an all-zero matrix).
double default_jitter(const SymMatrix& k);

// Lower-triangular L with L L^T = a + jitter * I.
// Throws NotPositiveDefinite if a pivot is nonpositive after jitter.
Matrix cholesky(const SymMatrix& a, double jitter);

// Full symmetric eigendecomposition, values ascending, orthonormal vectors.
EigenPairs sym_eigen(const SymMatrix& a);

// Solves m alpha = lambda (k_gram + jitter I) alpha via the Cholesky
// reduction K + jitter I = L L^T, the standard problem
// L^-1 m L^-T beta = lambda beta, and alpha = L^-T beta. Returned vectors
// satisfy alpha^T (K + jitter I) alpha = 1; pairs sorted by lambda ascending.
EigenPairs generalized_eigen(const SymMatrix& m, const SymMatrix& k_gram,
                             double jitter);

// Solves a x = rhs for SPD a (one solve per rhs column).
Matrix solve_spd(const SymMatrix& a, const Matrix& rhs);

}  // namespace numerics
}  // namespace fairkr
