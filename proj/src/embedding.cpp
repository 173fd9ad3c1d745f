#include "fairkr/embedding.hpp"

namespace fairkr::embedding {

std::string to_string(MdMatrixMode mode) {
  return mode == MdMatrixMode::PaperEq19 ? "paper-eq19" : "rank-one-md";
}

MdMatrixMode md_mode_from_string(const std::string& name) {
  if (name == "paper-eq19") return MdMatrixMode::PaperEq19;
  if (name == "rank-one-md") return MdMatrixMode::RankOneMD;
  throw InvalidConfig("unknown md matrix mode '" + name + "'");
}

numerics::SymMatrix build_md_matrix(const kernels::GramView& g,
                                    MdMatrixMode mode) {
  const Index n_u = g.n_u;
  const Index n_p = g.n_p();
  if (n_u == 0 || n_p == 0)
    throw DegenerateGroup("build_md_matrix: empty group (n_u=" +
                          std::to_string(n_u) + ", n_p=" +
                          std::to_string(n_p) + ")");
  const double inv_u = 1.0 / static_cast<double>(n_u);
  const double inv_p = 1.0 / static_cast<double>(n_p);
  const auto k_u = g.rows_u();
  const auto k_p = g.rows_p();

  if (mode == MdMatrixMode::RankOneMD) {
    const Vector gap =
        inv_u * k_u.colwise().sum().transpose() -
        inv_p * k_p.colwise().sum().transpose();
    return numerics::SymMatrix(gap * gap.transpose());
  }

  Matrix raw = inv_u * inv_u * (k_u.transpose() * k_u) +
               inv_p * inv_p * (k_p.transpose() * k_p);
  const Vector sum_u = k_u.colwise().sum().transpose();
  const Vector sum_p = k_p.colwise().sum().transpose();
  raw.noalias() -= (2.0 * inv_u * inv_p) * (sum_u * sum_p.transpose());
  return numerics::SymMatrix(std::move(raw));
}

EmbeddingModel fit_embeddings(const kernels::GramView& g, Matrix train_features,
                              const kernels::KernelSpec& spec, Index k,
                              MdMatrixMode mode, double jitter) {
  const Index n = g.n();
  if (k < 1) throw InvalidConfig("fit_embeddings: k must be >= 1");
  if (k > n)
    throw KTooLarge("fit_embeddings: k=" + std::to_string(k) +
                    " exceeds n=" + std::to_string(n));
  if (train_features.rows() != n)
    throw DimensionMismatch("fit_embeddings: features rows " +
                            std::to_string(train_features.rows()) +
                            " vs gram dim " + std::to_string(n));
  const numerics::SymMatrix md = build_md_matrix(g, mode);
  const numerics::EigenPairs pairs =
      numerics::generalized_eigen(md, g.full, jitter);

  EmbeddingModel model;
  model.train_features = std::move(train_features);
  model.spec = spec;
  model.coeffs = pairs.vectors.leftCols(k);
  model.eigenvalues = pairs.values.head(k);
  model.n_u = g.n_u;
  model.jitter = jitter;
  return model;
}

Matrix project_train(const EmbeddingModel& model, const kernels::GramView& g) {
  if (model.k() < 1) throw InvalidConfig("project_train: empty embedding");
  if (g.n() != model.n())
    throw DimensionMismatch("project_train: gram dim " +
                            std::to_string(g.n()) + " vs model n " +
                            std::to_string(model.n()));
  return g.full.mat() * model.coeffs;
}

Matrix project_test(const EmbeddingModel& model, const Matrix& test_features) {
  if (model.k() < 1) throw InvalidConfig("project_test: empty embedding");
  if (test_features.cols() != model.train_features.cols())
    throw DimensionMismatch("project_test: feature dim " +
                            std::to_string(test_features.cols()) + " vs " +
                            std::to_string(model.train_features.cols()));
  return kernels::cross_gram(model.spec, model.train_features, test_features) *
         model.coeffs;
}

}  // namespace fairkr::embedding
