#include "fairkr/numerics.hpp"

#include <cmath>
#include <string>

namespace fairkr::numerics {

namespace {

// Flip each column so its largest-magnitude entry is positive. Ties resolve
// to the lowest index, which keeps the output deterministic.
void apply_sign_convention(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (vectors(pivot, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("SymMatrix: matrix must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  if (!m.allFinite()) throw NonFinite("SymMatrix: entries must be finite");
  mat_ = 0.5 * (m + m.transpose());
}

double default_jitter(const SymMatrix& k) {
  if (k.dim() == 0) return 0.0;
  return 1e-8 * k.trace() / static_cast<double>(k.dim());
}

Matrix cholesky(const SymMatrix& a, double jitter) {
  if (jitter < 0.0) throw InvalidConfig("cholesky: jitter must be >= 0");
  Matrix work = a.mat();
  work.diagonal().array() += jitter;
  Eigen::LLT<Matrix> llt(work);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(
        "cholesky: nonpositive pivot (dim " + std::to_string(a.dim()) +
        ", jitter " + std::to_string(jitter) + "); raise the jitter");
  return llt.matrixL();
}

EigenPairs sym_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure(
        "sym_eigen: no convergence for dim " + std::to_string(a.dim()) +
        " within cap of " + std::to_string(30 * a.dim()) + " iterations");
  EigenPairs out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  apply_sign_convention(out.vectors);
  return out;
}

EigenPairs generalized_eigen(const SymMatrix& m, const SymMatrix& k_gram,
                             double jitter) {
  if (m.dim() != k_gram.dim())
    throw DimensionMismatch("generalized_eigen: dims " +
                            std::to_string(m.dim()) + " vs " +
                            std::to_string(k_gram.dim()));
  const Matrix lower = cholesky(k_gram, jitter);
  const auto lview = lower.triangularView<Eigen::Lower>();

  // C = L^-1 M L^-T, symmetrized to kill solve roundoff.
  Matrix half = lview.solve(m.mat());
  Matrix reduced = lview.solve(half.transpose());
  EigenPairs pairs = sym_eigen(SymMatrix(std::move(reduced)));

  Matrix alphas =
      lower.transpose().triangularView<Eigen::Upper>().solve(pairs.vectors);

  // Back-substitution keeps the K-norm at 1 only to roundoff; renormalize in
  // the jittered metric before fixing signs.
  Matrix metric = k_gram.mat();
  metric.diagonal().array() += jitter;
  for (Index j = 0; j < alphas.cols(); ++j) {
    const double knorm2 = alphas.col(j).dot(metric * alphas.col(j));
    if (knorm2 > 0.0) alphas.col(j) /= std::sqrt(knorm2);
  }
  apply_sign_convention(alphas);
  pairs.vectors = std::move(alphas);
  return pairs;
}

Matrix solve_spd(const SymMatrix& a, const Matrix& rhs) {
  if (a.dim() != rhs.rows())
    throw DimensionMismatch("solve_spd: matrix dim " + std::to_string(a.dim()) +
                            " vs rhs rows " + std::to_string(rhs.rows()));
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("solve_spd: matrix is not positive definite (dim " +
                              std::to_string(a.dim()) + ")");
  return llt.solve(rhs);
}

}  // namespace fairkr::numerics
