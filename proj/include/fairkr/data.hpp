#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairkr/numerics.hpp"

namespace fairkr::data {

using VectorXi = Eigen::VectorXi;

// Binarization rule for the sensitive or label column.
//   ThresholdAbove: 1 iff the parsed numeric value is strictly above the
//                   threshold.
//   ValueEquals:    1 iff the raw cell equals the given string.
struct BinRule {
  enum class Kind { ThresholdAbove, ValueEquals };
  Kind kind = Kind::ThresholdAbove;
  double threshold = 0.5;
  std::string value;

  static BinRule threshold_above(double t) {
    return {Kind::ThresholdAbove, t, ""};
  }
  static BinRule value_equals(std::string v) {
    return {Kind::ValueEquals, 0.0, std::move(v)};
  }
};

// Declarative description of how a CSV becomes a Dataset. When
// keep_sensitive_in_features is true the binarized sensitive value is a
// feature column (exempt from standardization); if the sensitive column is
// missing from feature_columns it is appended. max_rows, when set, uniformly
// subsamples larger files with subsample_seed.
struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::string sensitive_column;
  BinRule sensitive_rule;
  std::string label_column;
  BinRule label_rule;
  bool keep_sensitive_in_features = true;
  std::optional<Index> max_rows;
  std::uint64_t subsample_seed = 0;
  std::string notes;

  void validate() const;
};

// Group-ordered supervised dataset: rows with s=0 come first (the n_u
// unprotected rows), then the s=1 block. Rows with missing or unparseable
// cells were dropped at ingestion.
struct Dataset {
  Matrix features;
  VectorXi s;
  VectorXi y;
  Index n_u = 0;
  std::vector<std::string> feature_names;
  std::optional<Index> sensitive_feature_index;
  std::string provenance;
  Index dropped_rows = 0;

  Index n() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  Index n_p() const { return features.rows() - n_u; }
};

// Per-feature z-score parameters fitted on a training set. Population (n)
// standard deviation. Zero-variance features map to 0; the kept sensitive
// column passes through untouched.
struct ScalerParams {
  Vector mean;
  Vector std;
  std::optional<Index> skip_index;
};

Dataset load_csv(const std::string& path, const DatasetSchema& schema);

// Builds a Dataset directly from in-memory arrays (rows need not be group
// ordered; they are stably reordered unprotected-first).
Dataset from_arrays(Matrix features, VectorXi s, VectorXi y,
                    std::vector<std::string> feature_names = {},
                    std::optional<Index> sensitive_feature_index = std::nullopt,
                    std::string provenance = "in-memory");

ScalerParams fit_scaler(const Dataset& train);
Dataset apply_scaler(const Dataset& ds, const ScalerParams& params);

// z-scores both sets with parameters fitted on train.
std::tuple<Dataset, Dataset, ScalerParams> standardize(const Dataset& train,
                                                       const Dataset& test);

// Seeded uniform split with test size floor(n * test_fraction). Both sides
// are group ordered. If a side misses a group or a label value the split is
// redrawn with a derived seed, up to 100 attempts.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

}  // namespace fairkr::data
