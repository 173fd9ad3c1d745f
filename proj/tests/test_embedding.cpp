#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fairkr/embedding.hpp"
#include "fairkr/metrics.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace fairkr;
using embedding::MdMatrixMode;
using kernels::KernelSpec;

namespace {

// The 2-point hand example: x1=(1,0) unprotected, x2=(0,1) protected,
// linear kernel, so K = I.
kernels::GramView two_point_gram() {
  Matrix data(2, 2);
  data << 1, 0, 0, 1;
  return kernels::gram(KernelSpec::linear(), data, 1);
}

Matrix two_point_features() {
  Matrix data(2, 2);
  data << 1, 0, 0, 1;
  return data;
}

// Scalar expansion of the embedded group-mean gap for a candidate alpha.
double rank_one_quadratic(const kernels::GramView& g, const Vector& alpha) {
  const double mean_u = (g.rows_u() * alpha).mean();
  const double mean_p = (g.rows_p() * alpha).mean();
  return (mean_u - mean_p) * (mean_u - mean_p);
}

// Eq.-19-style scalar expansion with the squared block terms.
double paper_quadratic(const kernels::GramView& g, const Vector& alpha) {
  const Vector ku_alpha = g.rows_u() * alpha;
  const Vector kp_alpha = g.rows_p() * alpha;
  const double nu = static_cast<double>(g.n_u);
  const double np = static_cast<double>(g.n_p());
  return ku_alpha.squaredNorm() / (nu * nu) +
         kp_alpha.squaredNorm() / (np * np) -
         2.0 / (nu * np) * ku_alpha.sum() * kp_alpha.sum();
}

}  // namespace

TEST_CASE("build_md_matrix: identical groups give the zero matrix") {
  Matrix data(4, 2);
  data << 1, 2, 3, 4, 1, 2, 3, 4;
  const kernels::GramView g = kernels::gram(KernelSpec::linear(), data, 2);
  const numerics::SymMatrix m =
      embedding::build_md_matrix(g, MdMatrixMode::RankOneMD);
  CHECK(m.mat().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("build_md_matrix: two-point hand computation, both modes") {
  const kernels::GramView g = two_point_gram();
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  const numerics::SymMatrix rank_one =
      embedding::build_md_matrix(g, MdMatrixMode::RankOneMD);
  CHECK((rank_one.mat() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  const numerics::SymMatrix paper =
      embedding::build_md_matrix(g, MdMatrixMode::PaperEq19);
  CHECK((paper.mat() - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("build_md_matrix: degenerate group is rejected") {
  Matrix data(2, 2);
  data << 1, 0, 0, 1;
  const kernels::GramView g = kernels::gram(KernelSpec::linear(), data, 2);
  CHECK_THROWS_AS(embedding::build_md_matrix(g, MdMatrixMode::RankOneMD),
                  DegenerateGroup);
}

TEST_CASE("build_md_matrix: quadratic form matches scalar expansion") {
  rng::Engine eng(71);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 4 + static_cast<Index>(eng.below(16));
    const Index n_u = 1 + static_cast<Index>(eng.below(static_cast<std::uint64_t>(n - 1)));
    const Matrix data = testutil::random_matrix(eng, n, 3);
    const kernels::GramView g =
        kernels::gram(KernelSpec::rbf(0.5), data, n_u);
    const Vector alpha = testutil::random_vector(eng, n);

    const numerics::SymMatrix rank_one =
        embedding::build_md_matrix(g, MdMatrixMode::RankOneMD);
    const double direct_r1 = rank_one_quadratic(g, alpha);
    const double form_r1 = alpha.dot(rank_one.mat() * alpha);
    CHECK(std::abs(form_r1 - direct_r1) <= 1e-8 * (1.0 + std::abs(direct_r1)));

    const numerics::SymMatrix paper =
        embedding::build_md_matrix(g, MdMatrixMode::PaperEq19);
    const double direct_p = paper_quadratic(g, alpha);
    const double form_p = alpha.dot(paper.mat() * alpha);
    CHECK(std::abs(form_p - direct_p) <= 1e-8 * (1.0 + std::abs(direct_p)));
  }
}

TEST_CASE("fit_embeddings: two-point example gives the null direction") {
  const kernels::GramView g = two_point_gram();
  const embedding::EmbeddingModel model = embedding::fit_embeddings(
      g, two_point_features(), KernelSpec::linear(), 1, MdMatrixMode::RankOneMD,
      0.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(model.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(model.coeffs(0, 0) == doctest::Approx(inv_sqrt2));
  CHECK(model.coeffs(1, 0) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("fit_embeddings: k equal to n returns a full K-orthonormal basis") {
  rng::Engine eng(83);
  const Index n = 10;
  const Matrix data = testutil::random_matrix(eng, n, 3);
  const kernels::GramView g = kernels::gram(KernelSpec::rbf(0.8), data, 4);
  const double jitter = numerics::default_jitter(g.full);
  const embedding::EmbeddingModel model = embedding::fit_embeddings(
      g, data, KernelSpec::rbf(0.8), n, MdMatrixMode::RankOneMD, jitter);
  Matrix metric = g.full.mat();
  metric.diagonal().array() += jitter;
  const Matrix gram_a = model.coeffs.transpose() * metric * model.coeffs;
  CHECK((gram_a - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fit_embeddings: rank-one objective has n-1 null directions") {
  rng::Engine eng(97);
  const Index n = 12;
  const Matrix data = testutil::random_matrix(eng, n, 4);
  const kernels::GramView g =
      kernels::gram(KernelSpec::polynomial(2, 0.1), data, 5);
  const embedding::EmbeddingModel model = embedding::fit_embeddings(
      g, data, KernelSpec::polynomial(2, 0.1), n - 1, MdMatrixMode::RankOneMD,
      numerics::default_jitter(g.full));
  for (Index j = 0; j < model.k(); ++j)
    CHECK(model.eigenvalues[j] <= 1e-8);
}

TEST_CASE("fit_embeddings: k bounds") {
  const kernels::GramView g = two_point_gram();
  CHECK_THROWS_AS(
      embedding::fit_embeddings(g, two_point_features(), KernelSpec::linear(),
                                0, MdMatrixMode::RankOneMD, 0.0),
      InvalidConfig);
  CHECK_THROWS_AS(
      embedding::fit_embeddings(g, two_point_features(), KernelSpec::linear(),
                                3, MdMatrixMode::RankOneMD, 0.0),
      KTooLarge);
}

TEST_CASE("fit_embeddings: minimizer beats random K-normalized vectors") {
  rng::Engine eng(101);
  const Index n = 14;
  const Matrix data = testutil::random_matrix(eng, n, 3);
  const kernels::GramView g = kernels::gram(KernelSpec::rbf(0.6), data, 6);
  const double jitter = numerics::default_jitter(g.full);
  const numerics::SymMatrix md =
      embedding::build_md_matrix(g, MdMatrixMode::RankOneMD);
  const embedding::EmbeddingModel model = embedding::fit_embeddings(
      g, data, KernelSpec::rbf(0.6), 1, MdMatrixMode::RankOneMD, jitter);
  const Vector alpha = model.coeffs.col(0);
  const double fitted = alpha.dot(md.mat() * alpha);
  Matrix metric = g.full.mat();
  metric.diagonal().array() += jitter;
  rng::Engine search_eng(555);
  const double searched =
      oracles::random_search_min_quadratic(md.mat(), metric, 10000, search_eng);
  CHECK(fitted <= searched + 1e-6);
}

TEST_CASE("project_train: selector column and hand example") {
  rng::Engine eng(113);
  const Index n = 6;
  const Matrix data = testutil::random_matrix(eng, n, 2);
  const kernels::GramView g = kernels::gram(KernelSpec::rbf(1.0), data, 3);
  embedding::EmbeddingModel model;
  model.train_features = data;
  model.spec = KernelSpec::rbf(1.0);
  model.coeffs = Matrix::Zero(n, 1);
  model.coeffs(0, 0) = 1.0;
  model.eigenvalues = Vector::Zero(1);
  model.n_u = 3;
  const Matrix x_fs = embedding::project_train(model, g);
  CHECK(testutil::bitwise_equal(x_fs, Matrix(g.full.mat().col(0))));

  const kernels::GramView g2 = two_point_gram();
  const embedding::EmbeddingModel hand = embedding::fit_embeddings(
      g2, two_point_features(), KernelSpec::linear(), 1,
      MdMatrixMode::RankOneMD, 0.0);
  const Matrix proj = embedding::project_train(hand, g2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(proj(0, 0) == doctest::Approx(inv_sqrt2));
  CHECK(proj(1, 0) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("project_test: consistency with project_train and hand example") {
  rng::Engine eng(127);
  const Index n = 9;
  const Matrix data = testutil::random_matrix(eng, n, 3);
  const kernels::GramView g =
      kernels::gram(KernelSpec::polynomial(3, 0.1), data, 4);
  const embedding::EmbeddingModel model = embedding::fit_embeddings(
      g, data, KernelSpec::polynomial(3, 0.1), 2, MdMatrixMode::RankOneMD,
      numerics::default_jitter(g.full));
  const Matrix train_proj = embedding::project_train(model, g);
  const Matrix test_proj = embedding::project_test(model, data);
  CHECK(testutil::bitwise_equal(train_proj, test_proj));

  Matrix duplicated(2, 3);
  duplicated.row(0) = data.row(5);
  duplicated.row(1) = data.row(5);
  const Matrix dup_proj = embedding::project_test(model, duplicated);
  CHECK(testutil::bitwise_equal(Matrix(dup_proj.row(0)), Matrix(dup_proj.row(1))));

  const embedding::EmbeddingModel hand = embedding::fit_embeddings(
      two_point_gram(), two_point_features(), KernelSpec::linear(), 1,
      MdMatrixMode::RankOneMD, 0.0);
  Matrix z(1, 2);
  z << 1, 0;
  const Matrix zp = embedding::project_test(hand, z);
  CHECK(zp(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("empirical MD property: embedded group-mean gap equals eigenvalue") {
  rng::Engine eng(139);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 8 + static_cast<Index>(eng.below(20));
    const Index n_u = 2 + static_cast<Index>(eng.below(static_cast<std::uint64_t>(n - 3)));
    const Matrix data = testutil::random_matrix(eng, n, 4);
    const kernels::GramView g = kernels::gram(KernelSpec::rbf(0.4), data, n_u);
    const Index k = std::min<Index>(4, n);
    const embedding::EmbeddingModel model =
        embedding::fit_embeddings(g, data, KernelSpec::rbf(0.4), k,
                                  MdMatrixMode::RankOneMD,
                                  numerics::default_jitter(g.full));
    const Matrix x_fs = embedding::project_train(model, g);
    double gap_total = 0.0;
    for (Index j = 0; j < k; ++j) {
      const double mean_u = x_fs.col(j).head(n_u).mean();
      const double mean_p = x_fs.col(j).tail(n - n_u).mean();
      const double gap_sq = (mean_u - mean_p) * (mean_u - mean_p);
      CHECK(std::abs(gap_sq - model.eigenvalues[j]) <= 1e-6);
      gap_total += gap_sq;
    }
    CHECK(std::abs(metrics::mean_discrepancy_embedded(x_fs, n_u) - gap_total) <=
          1e-9);
  }
}

TEST_CASE("mode round trip strings") {
  CHECK(embedding::md_mode_from_string("rank-one-md") == MdMatrixMode::RankOneMD);
  CHECK(embedding::md_mode_from_string("paper-eq19") == MdMatrixMode::PaperEq19);
  CHECK_THROWS_AS(embedding::md_mode_from_string("nope"), InvalidConfig);
}
