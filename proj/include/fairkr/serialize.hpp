#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "fairkr/data.hpp"
#include "fairkr/regression.hpp"

namespace fairkr::serialize {

using json = nlohmann::json;

// Format tags written into every model document.
inline constexpr const char* kEmbeddingFormat = "fkrf2e-model/1";
inline constexpr const char* kRegressorFormat = "fkrf2e-regressor/1";
inline constexpr const char* kFkrrFormat = "fkrr-model/1";

json to_json(const kernels::KernelSpec& spec);
kernels::KernelSpec kernel_spec_from_json(const json& j);

json to_json(const embedding::EmbeddingModel& model);
embedding::EmbeddingModel embedding_from_json(const json& j);

json to_json(const regression::FairRegressor& model);
regression::FairRegressor regressor_from_json(const json& j);

json to_json(const regression::FkrrModel& model);
regression::FkrrModel fkrr_from_json(const json& j);

json to_json(const data::DatasetSchema& schema);
data::DatasetSchema schema_from_json(const json& j);

// Round-trip helpers for dense types.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

// File IO with path-annotated errors.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// Shortest-round-trip decimal text for a double; used everywhere a double
// lands in CSV so reruns are byte identical.
std::string format_double(double v);

}  // namespace fairkr::serialize
