#pragma once

#include <string>

#include "fairkr/kernels.hpp"
#include "fairkr/numerics.hpp"

namespace fairkr::embedding {

// Which discrepancy matrix the eigenproblem minimizes.
//
// RankOneMD builds M = m m^T from the gap of kernel group means,
//   m = (1/n_u) K_u^T 1_u - (1/n_p) K_p^T 1_p,
// so alpha^T M alpha is exactly the squared embedded group-mean gap.
//
// PaperEq19 builds the three-term form
//   (1/n_u^2) K_u^T K_u - (2/(n_u n_p)) K_u^T 1_u 1_p^T K_p
//   + (1/n_p^2) K_p^T K_p,
// symmetrized by averaging with its transpose. The two differ in their
// squared terms; RankOneMD is the default.
enum class MdMatrixMode { PaperEq19, RankOneMD };

std::string to_string(MdMatrixMode mode);
MdMatrixMode md_mode_from_string(const std::string& name);

// Fair feature embedding directions in kernel space. Column j of coeffs is
// the training-instance combination defining direction j; directions are
// K-orthonormal (A^T (K + jitter I) A = I) and ordered by ascending
// eigenvalue, i.e. ascending embedded group-mean discrepancy.
struct EmbeddingModel {
  Matrix train_features;
  kernels::KernelSpec spec;
  Matrix coeffs;       // n x k
  Vector eigenvalues;  // k, ascending
  Index n_u = 0;
  double jitter = 0.0;

  Index n() const { return coeffs.rows(); }
  Index k() const { return coeffs.cols(); }
};

numerics::SymMatrix build_md_matrix(const kernels::GramView& g,
                                    MdMatrixMode mode);

// Solves build_md_matrix(g, mode) alpha = lambda (K + jitter I) alpha and
// keeps the k smallest-eigenvalue directions. train_features/spec are
// retained for test-time kernel rows; g must have been built from them.
EmbeddingModel fit_embeddings(const kernels::GramView& g, Matrix train_features,
                              const kernels::KernelSpec& spec, Index k,
                              MdMatrixMode mode, double jitter);

// Embedded training matrix X_FS = K A (n x k).
Matrix project_train(const EmbeddingModel& model, const kernels::GramView& g);

// Embedded test matrix: cross-gram rows against the training set times A.
Matrix project_test(const EmbeddingModel& model, const Matrix& test_features);

}  // namespace fairkr::embedding
