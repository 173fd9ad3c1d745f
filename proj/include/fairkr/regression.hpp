#pragma once

#include "fairkr/embedding.hpp"

namespace fairkr::regression {

using VectorXi = Eigen::VectorXi;

// Ridge regressor on embedded fair features, with a decision threshold for
// classification.
struct FairRegressor {
  embedding::EmbeddingModel embedding;
  Vector beta;
  double ridge_gamma = 0.0;
  double threshold = 0.5;
};

// Baseline fair kernel ridge regression: squared loss plus mu times the
// correlation between centered predictions and the centered demographic
// feature, plus lambda times the RKHS norm c^T K c.
struct FkrrModel {
  Matrix train_features;
  kernels::KernelSpec spec;
  Vector dual_coeffs;
  double mu = 1.0;
  double lambda = 1.0;
  double threshold = 0.5;
};

// Solves (X^T X + gamma I) beta = X^T y. With gamma == 0 a singular normal
// matrix is retried under escalating jitter.
Vector fit_ridge(const Matrix& x_fs, const Vector& y, double gamma);

// Scores for test rows: embedded representation times beta.
Vector predict(const FairRegressor& model, const Matrix& test_features);

// Scores for test rows: kernel rows against training data times dual coeffs.
Vector predict(const FkrrModel& model, const Matrix& test_features);

// label = 1 iff score >= threshold (ties go to 1).
VectorXi classify(const Vector& scores, double threshold);

// Convenience composition of Step 1 + Step 2: fit embeddings on the training
// gram, project, and ridge-fit the projections against y. jitter < 0 selects
// the scale-aware default for the training gram.
FairRegressor fit_fair_regressor(const Matrix& train_features, Index n_u,
                                 const Vector& y,
                                 const kernels::KernelSpec& spec, Index k,
                                 embedding::MdMatrixMode mode, double jitter,
                                 double gamma, double threshold = 0.5);

// Stationary point of |Kc - y|^2 + mu (H K c)^T s_bar + lambda c^T K c with
// H = I - (1/n) 1 1^T and s_bar = H s:
//   (K^T K + lambda K + jitter I) c = K^T y - (mu/2) K^T H s_bar.
// Singular systems are retried under escalating jitter.
FkrrModel fit_fkrr(const Matrix& features, const VectorXi& s, const Vector& y,
                   const kernels::KernelSpec& spec, double mu, double lambda,
                   double threshold = 0.5);

}  // namespace fairkr::regression
