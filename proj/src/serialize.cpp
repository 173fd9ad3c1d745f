#include "fairkr/serialize.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace fairkr::serialize {

namespace {

void require_format(const json& j, const std::string& expected) {
  const std::string got = j.value("format", "");
  if (got != expected)
    throw InvalidConfig("serialize: expected format '" + expected +
                        "', got '" + got + "'");
}

}  // namespace

json to_json(const kernels::KernelSpec& spec) {
  return json{{"family", kernels::to_string(spec.family)},
              {"degree", spec.degree},
              {"coef", spec.coef},
              {"gain", spec.gain}};
}

kernels::KernelSpec kernel_spec_from_json(const json& j) {
  kernels::KernelSpec spec;
  spec.family = kernels::kernel_family_from_string(j.at("family").get<std::string>());
  spec.degree = j.value("degree", 4);
  spec.coef = j.value("coef", 0.1);
  spec.gain = j.value("gain", 1.0);
  return spec;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  Matrix m(rows, cols);
  const json& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows)
    throw InvalidConfig("matrix_from_json: row count mismatch");
  for (Index i = 0; i < rows; ++i) {
    const json& row = data[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != cols)
      throw InvalidConfig("matrix_from_json: column count mismatch");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

json to_json(const embedding::EmbeddingModel& model) {
  return json{{"format", kEmbeddingFormat},
              {"kernel", to_json(model.spec)},
              {"n_u", model.n_u},
              {"jitter", model.jitter},
              {"eigenvalues", vector_to_json(model.eigenvalues)},
              {"coeffs", matrix_to_json(model.coeffs)},
              {"train_features", matrix_to_json(model.train_features)}};
}

embedding::EmbeddingModel embedding_from_json(const json& j) {
  require_format(j, kEmbeddingFormat);
  embedding::EmbeddingModel model;
  model.spec = kernel_spec_from_json(j.at("kernel"));
  model.n_u = j.at("n_u").get<Index>();
  model.jitter = j.at("jitter").get<double>();
  model.eigenvalues = vector_from_json(j.at("eigenvalues"));
  model.coeffs = matrix_from_json(j.at("coeffs"));
  model.train_features = matrix_from_json(j.at("train_features"));
  if (model.coeffs.rows() != model.train_features.rows() ||
      model.coeffs.cols() != model.eigenvalues.size())
    throw InvalidConfig("embedding_from_json: inconsistent shapes");
  return model;
}

json to_json(const regression::FairRegressor& model) {
  return json{{"format", kRegressorFormat},
              {"embedding", to_json(model.embedding)},
              {"beta", vector_to_json(model.beta)},
              {"ridge_gamma", model.ridge_gamma},
              {"threshold", model.threshold}};
}

regression::FairRegressor regressor_from_json(const json& j) {
  require_format(j, kRegressorFormat);
  regression::FairRegressor model;
  model.embedding = embedding_from_json(j.at("embedding"));
  model.beta = vector_from_json(j.at("beta"));
  model.ridge_gamma = j.at("ridge_gamma").get<double>();
  model.threshold = j.at("threshold").get<double>();
  if (model.beta.size() != model.embedding.k())
    throw InvalidConfig("regressor_from_json: beta length != k");
  return model;
}

json to_json(const regression::FkrrModel& model) {
  return json{{"format", kFkrrFormat},
              {"kernel", to_json(model.spec)},
              {"train_features", matrix_to_json(model.train_features)},
              {"dual_coeffs", vector_to_json(model.dual_coeffs)},
              {"mu", model.mu},
              {"lambda", model.lambda},
              {"threshold", model.threshold}};
}

regression::FkrrModel fkrr_from_json(const json& j) {
  require_format(j, kFkrrFormat);
  regression::FkrrModel model;
  model.spec = kernel_spec_from_json(j.at("kernel"));
  model.train_features = matrix_from_json(j.at("train_features"));
  model.dual_coeffs = vector_from_json(j.at("dual_coeffs"));
  model.mu = j.at("mu").get<double>();
  model.lambda = j.at("lambda").get<double>();
  model.threshold = j.at("threshold").get<double>();
  if (model.dual_coeffs.size() != model.train_features.rows())
    throw InvalidConfig("fkrr_from_json: dual coeff length != n");
  return model;
}

namespace {

json to_json(const data::BinRule& rule) {
  if (rule.kind == data::BinRule::Kind::ThresholdAbove)
    return json{{"kind", "threshold_above"}, {"threshold", rule.threshold}};
  return json{{"kind", "value_equals"}, {"value", rule.value}};
}

data::BinRule bin_rule_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "threshold_above")
    return data::BinRule::threshold_above(j.at("threshold").get<double>());
  if (kind == "value_equals")
    return data::BinRule::value_equals(j.at("value").get<std::string>());
  throw InvalidConfig("schema: unknown rule kind '" + kind + "'");
}

}  // namespace

json to_json(const data::DatasetSchema& schema) {
  json j{{"feature_columns", schema.feature_columns},
         {"sensitive_column", schema.sensitive_column},
         {"sensitive_rule", to_json(schema.sensitive_rule)},
         {"label_column", schema.label_column},
         {"label_rule", to_json(schema.label_rule)},
         {"keep_sensitive_in_features", schema.keep_sensitive_in_features}};
  if (schema.max_rows) {
    j["max_rows"] = *schema.max_rows;
    j["subsample_seed"] = schema.subsample_seed;
  }
  if (!schema.notes.empty()) j["notes"] = schema.notes;
  return j;
}

data::DatasetSchema schema_from_json(const json& j) {
  data::DatasetSchema schema;
  schema.feature_columns =
      j.value("feature_columns", std::vector<std::string>{});
  schema.sensitive_column = j.at("sensitive_column").get<std::string>();
  schema.sensitive_rule = bin_rule_from_json(j.at("sensitive_rule"));
  schema.label_column = j.at("label_column").get<std::string>();
  schema.label_rule = bin_rule_from_json(j.at("label_rule"));
  schema.keep_sensitive_in_features =
      j.value("keep_sensitive_in_features", true);
  if (j.contains("max_rows")) schema.max_rows = j.at("max_rows").get<Index>();
  schema.subsample_seed = j.value("subsample_seed", std::uint64_t{0});
  schema.notes = j.value("notes", std::string{});
  schema.validate();
  return schema;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig("failed to parse JSON from '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string format_double(double v) { return json(v).dump(); }

}  // namespace fairkr::serialize
