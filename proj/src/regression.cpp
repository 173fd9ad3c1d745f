#include "fairkr/regression.hpp"

namespace fairkr::regression {

namespace {

// Solve a x = rhs, escalating a relative diagonal jitter while the
// factorization reports a nonpositive pivot. Escalation is deterministic.
Vector solve_with_jitter_escalation(const Matrix& a, const Vector& rhs,
                                    double initial_jitter) {
  const double scale =
      std::max(1.0, a.trace() / static_cast<double>(std::max<Index>(a.rows(), 1)));
  double jitter = initial_jitter;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Matrix work = a;
    work.diagonal().array() += jitter;
    try {
      return numerics::solve_spd(numerics::SymMatrix(std::move(work)), rhs);
    } catch (const NotPositiveDefinite&) {
      jitter = (jitter == 0.0) ? 1e-12 * scale : jitter * 100.0;
    }
  }
  throw NotPositiveDefinite(
      "solve_with_jitter_escalation: system stayed indefinite after 16 "
      "escalations");
}

}  // namespace

Vector fit_ridge(const Matrix& x_fs, const Vector& y, double gamma) {
  if (x_fs.rows() != y.size())
    throw DimensionMismatch("fit_ridge: rows " + std::to_string(x_fs.rows()) +
                            " vs labels " + std::to_string(y.size()));
  if (gamma < 0.0) throw InvalidConfig("fit_ridge: gamma must be >= 0");
  Matrix normal = x_fs.transpose() * x_fs;
  normal.diagonal().array() += gamma;
  const Vector rhs = x_fs.transpose() * y;
  return solve_with_jitter_escalation(normal, rhs, 0.0);
}

Vector predict(const FairRegressor& model, const Matrix& test_features) {
  return embedding::project_test(model.embedding, test_features) * model.beta;
}

Vector predict(const FkrrModel& model, const Matrix& test_features) {
  return kernels::cross_gram(model.spec, model.train_features, test_features) *
         model.dual_coeffs;
}

VectorXi classify(const Vector& scores, double threshold) {
  if (!scores.allFinite()) throw NonFinite("classify: scores must be finite");
  VectorXi labels(scores.size());
  for (Index i = 0; i < scores.size(); ++i)
    labels[i] = scores[i] >= threshold ? 1 : 0;
  return labels;
}

FairRegressor fit_fair_regressor(const Matrix& train_features, Index n_u,
                                 const Vector& y,
                                 const kernels::KernelSpec& spec, Index k,
                                 embedding::MdMatrixMode mode, double jitter,
                                 double gamma, double threshold) {
  if (train_features.rows() != y.size())
    throw DimensionMismatch("fit_fair_regressor: rows " +
                            std::to_string(train_features.rows()) +
                            " vs labels " + std::to_string(y.size()));
  const kernels::GramView g = kernels::gram(spec, train_features, n_u);
  if (jitter < 0.0) jitter = numerics::default_jitter(g.full);
  FairRegressor model;
  model.embedding =
      embedding::fit_embeddings(g, train_features, spec, k, mode, jitter);
  const Matrix x_fs = embedding::project_train(model.embedding, g);
  model.beta = fit_ridge(x_fs, y, gamma);
  model.ridge_gamma = gamma;
  model.threshold = threshold;
  return model;
}

FkrrModel fit_fkrr(const Matrix& features, const VectorXi& s, const Vector& y,
                   const kernels::KernelSpec& spec, double mu, double lambda,
                   double threshold) {
  const Index n = features.rows();
  if (s.size() != n || y.size() != n)
    throw DimensionMismatch("fit_fkrr: rows " + std::to_string(n) + " vs s " +
                            std::to_string(s.size()) + " vs y " +
                            std::to_string(y.size()));
  if (mu < 0.0 || lambda < 0.0)
    throw InvalidConfig("fit_fkrr: mu and lambda must be >= 0");

  // Group ordering is irrelevant here; fkrr uses the full Gram matrix.
  const Matrix kmat = kernels::gram(spec, features, 0).full.mat();

  const Vector s_real = s.cast<double>();
  const Vector s_centered = s_real.array() - s_real.mean();
  // H s_bar = s_bar since centering is idempotent.
  const Vector rhs = kmat.transpose() * y - 0.5 * mu * (kmat.transpose() * s_centered);
  const Matrix system = kmat.transpose() * kmat + lambda * kmat;

  FkrrModel model;
  model.train_features = features;
  model.spec = spec;
  model.dual_coeffs = solve_with_jitter_escalation(system, rhs, 0.0);
  model.mu = mu;
  model.lambda = lambda;
  model.threshold = threshold;
  return model;
}

}  // namespace fairkr::regression
