#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <unistd.h>

#include "fairkr/serialize.hpp"
#include "support/testutil.hpp"

using namespace fairkr;
using kernels::KernelSpec;
using VectorXi = Eigen::VectorXi;

namespace {

regression::FairRegressor fitted_regressor(std::uint64_t seed) {
  rng::Engine eng(seed);
  const Index n = 12;
  const Matrix data = testutil::random_matrix(eng, n, 3);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = eng.below(2) ? 1.0 : 0.0;
  return regression::fit_fair_regressor(data, 5, y, KernelSpec::rbf(0.6), 3,
                                        embedding::MdMatrixMode::RankOneMD,
                                        -1.0, 0.2);
}

}  // namespace

TEST_CASE("kernel spec round trip") {
  const KernelSpec spec = KernelSpec::polynomial(5, 0.01);
  const KernelSpec back =
      serialize::kernel_spec_from_json(serialize::to_json(spec));
  CHECK(back.family == spec.family);
  CHECK(back.degree == spec.degree);
  CHECK(back.coef == spec.coef);
}

TEST_CASE("embedding model round trip preserves projections exactly") {
  const regression::FairRegressor model = fitted_regressor(3);
  const embedding::EmbeddingModel back =
      serialize::embedding_from_json(serialize::to_json(model.embedding));
  CHECK(testutil::bitwise_equal(back.coeffs, model.embedding.coeffs));
  CHECK(testutil::bitwise_equal(back.train_features,
                                model.embedding.train_features));
  CHECK(back.jitter == model.embedding.jitter);
  CHECK(back.n_u == model.embedding.n_u);

  rng::Engine eng(9);
  const Matrix test = testutil::random_matrix(eng, 4, 3);
  CHECK(testutil::bitwise_equal(embedding::project_test(back, test),
                                embedding::project_test(model.embedding, test)));
}

TEST_CASE("regressor round trip preserves predictions exactly") {
  const regression::FairRegressor model = fitted_regressor(5);
  const regression::FairRegressor back =
      serialize::regressor_from_json(serialize::to_json(model));
  rng::Engine eng(11);
  const Matrix test = testutil::random_matrix(eng, 6, 3);
  CHECK(testutil::bitwise_equal(regression::predict(back, test),
                                regression::predict(model, test)));
  CHECK(back.ridge_gamma == model.ridge_gamma);
  CHECK(back.threshold == model.threshold);
}

TEST_CASE("fkrr model round trip") {
  rng::Engine eng(13);
  const Index n = 10;
  const Matrix data = testutil::random_matrix(eng, n, 2);
  VectorXi s(n);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    s[i] = static_cast<int>(eng.below(2));
    y[i] = eng.below(2) ? 1.0 : 0.0;
  }
  const regression::FkrrModel model =
      regression::fit_fkrr(data, s, y, KernelSpec::sigmoid(0.5, 0.01), 1.5, 0.7);
  const regression::FkrrModel back =
      serialize::fkrr_from_json(serialize::to_json(model));
  const Matrix test = testutil::random_matrix(eng, 3, 2);
  CHECK(testutil::bitwise_equal(regression::predict(back, test),
                                regression::predict(model, test)));
  CHECK(back.mu == model.mu);
  CHECK(back.lambda == model.lambda);
}

TEST_CASE("format tags are enforced") {
  const regression::FairRegressor model = fitted_regressor(7);
  serialize::json j = serialize::to_json(model);
  CHECK(j.at("format").get<std::string>() == "fkrf2e-regressor/1");
  j["format"] = "fkrf2e-regressor/2";
  CHECK_THROWS_AS(serialize::regressor_from_json(j), InvalidConfig);
  CHECK_THROWS_AS(serialize::embedding_from_json(serialize::to_json(model)),
                  InvalidConfig);
}

TEST_CASE("file IO with path context") {
  const std::string path =
      (std::filesystem::temp_directory_path() /
       ("fairkr_serialize_" + std::to_string(::getpid()) + ".json"))
          .string();
  const regression::FairRegressor model = fitted_regressor(17);
  serialize::write_json_file(path, serialize::to_json(model));
  const serialize::json j = serialize::read_json_file(path);
  const regression::FairRegressor back = serialize::regressor_from_json(j);
  CHECK(testutil::bitwise_equal(back.beta, model.beta));
  std::remove(path.c_str());
  CHECK_THROWS_AS(serialize::read_json_file(path), IoError);
  CHECK_THROWS_AS(serialize::write_json_file("/nonexistent/dir/x.json",
                                             serialize::json::object()),
                  IoError);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(serialize::format_double(0.1) == "0.1");
  CHECK(serialize::format_double(1.0) == "1.0");
  CHECK(std::stod(serialize::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  rng::Engine eng(19);
  for (int i = 0; i < 200; ++i) {
    const double v = eng.normal() * std::pow(10.0, static_cast<double>(eng.below(8)) - 4.0);
    CHECK(std::stod(serialize::format_double(v)) == v);
  }
}
