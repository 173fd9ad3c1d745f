#include "fairkr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fairkr/rng.hpp"

namespace fairkr::data {

namespace {

// RFC-4180-style row reader: quoted fields may contain commas, doubled
// quotes escape a quote. Multi-line quoted fields are out of scope.
std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& raw) {
  const std::string t = trimmed(raw);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

// Applies a binarization rule to a raw cell; nullopt = unparseable (row is
// dropped, same as a missing value).
std::optional<int> binarize(const BinRule& rule, const std::string& raw) {
  if (rule.kind == BinRule::Kind::ValueEquals)
    return trimmed(raw) == rule.value ? 1 : 0;
  const std::optional<double> v = parse_number(raw);
  if (!v) return std::nullopt;
  return *v > rule.threshold ? 1 : 0;
}

// FNV-1a, used only for provenance fingerprints.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string schema_fingerprint(const DatasetSchema& schema) {
  std::ostringstream os;
  for (const auto& c : schema.feature_columns) os << c << '\x1f';
  os << schema.sensitive_column << '\x1f'
     << static_cast<int>(schema.sensitive_rule.kind) << '\x1f'
     << schema.sensitive_rule.threshold << '\x1f' << schema.sensitive_rule.value
     << '\x1f' << schema.label_column << '\x1f'
     << static_cast<int>(schema.label_rule.kind) << '\x1f'
     << schema.label_rule.threshold << '\x1f' << schema.label_rule.value
     << '\x1f' << schema.keep_sensitive_in_features;
  std::ostringstream hex;
  hex << std::hex << fnv1a(os.str());
  return hex.str();
}

// Stable unprotected-first permutation applied to all row-aligned arrays.
void reorder_groups(Matrix& features, VectorXi& s, VectorXi& y, Index& n_u) {
  const Index n = features.rows();
  std::vector<Index> order;
  order.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (s[i] == 0) order.push_back(i);
  n_u = static_cast<Index>(order.size());
  for (Index i = 0; i < n; ++i)
    if (s[i] == 1) order.push_back(i);

  Matrix f2(n, features.cols());
  VectorXi s2(n), y2(n);
  for (Index i = 0; i < n; ++i) {
    f2.row(i) = features.row(order[i]);
    s2[i] = s[order[i]];
    y2[i] = y[order[i]];
  }
  features = std::move(f2);
  s = std::move(s2);
  y = std::move(y2);
}

Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), ds.features.cols());
  out.s.resize(static_cast<Index>(rows.size()));
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = ds.features.row(rows[i]);
    out.s[static_cast<Index>(i)] = ds.s[rows[i]];
    out.y[static_cast<Index>(i)] = ds.y[rows[i]];
  }
  out.feature_names = ds.feature_names;
  out.sensitive_feature_index = ds.sensitive_feature_index;
  out.provenance = ds.provenance;
  reorder_groups(out.features, out.s, out.y, out.n_u);
  return out;
}

bool has_both_groups_and_labels(const Dataset& ds) {
  bool s0 = false, s1 = false, y0 = false, y1 = false;
  for (Index i = 0; i < ds.n(); ++i) {
    (ds.s[i] == 0 ? s0 : s1) = true;
    (ds.y[i] == 0 ? y0 : y1) = true;
  }
  return s0 && s1 && y0 && y1;
}

}  // namespace

void DatasetSchema::validate() const {
  if (feature_columns.empty() && !keep_sensitive_in_features)
    throw InvalidConfig("schema: no feature columns");
  if (sensitive_column.empty()) throw InvalidConfig("schema: sensitive_column is empty");
  if (label_column.empty()) throw InvalidConfig("schema: label_column is empty");
  if (sensitive_column == label_column)
    throw InvalidConfig("schema: sensitive and label columns coincide");
  for (const auto& c : feature_columns) {
    if (c == label_column)
      throw InvalidConfig("schema: label column '" + c +
                          "' may not be a feature");
    if (c == sensitive_column && !keep_sensitive_in_features)
      throw InvalidConfig("schema: sensitive column '" + c +
                          "' listed as feature but "
                          "keep_sensitive_in_features is false");
  }
  if (std::count(feature_columns.begin(), feature_columns.end(),
                 sensitive_column) > 1)
    throw InvalidConfig("schema: sensitive column listed more than once");
  if (max_rows && *max_rows < 2)
    throw InvalidConfig("schema: max_rows must be >= 2");
}

Dataset load_csv(const std::string& path, const DatasetSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw IoError("load_csv: '" + path + "' is empty");
  const std::vector<std::string> header = parse_csv_row(line);
  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i)
    col_index[trimmed(header[i])] = i;

  auto require_col = [&](const std::string& name) -> std::size_t {
    auto it = col_index.find(name);
    if (it == col_index.end())
      throw MissingColumn("load_csv: column '" + name + "' not in '" + path +
                          "'");
    return it->second;
  };

  // Resolve which CSV columns feed the feature matrix. The kept sensitive
  // column is materialized from the binarized value.
  std::vector<std::string> feature_names = schema.feature_columns;
  std::optional<Index> sensitive_idx;
  if (schema.keep_sensitive_in_features) {
    auto it = std::find(feature_names.begin(), feature_names.end(),
                        schema.sensitive_column);
    if (it == feature_names.end()) {
      feature_names.push_back(schema.sensitive_column);
      sensitive_idx = static_cast<Index>(feature_names.size() - 1);
    } else {
      sensitive_idx = static_cast<Index>(it - feature_names.begin());
    }
  }
  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(feature_names.size());
  for (const auto& name : feature_names) feature_cols.push_back(require_col(name));
  const std::size_t sensitive_col = require_col(schema.sensitive_column);
  const std::size_t label_col = require_col(schema.label_column);

  std::vector<std::vector<double>> rows;
  std::vector<int> s_vals, y_vals;
  Index dropped = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = parse_csv_row(line);
    if (cells.size() != header.size()) {
      ++dropped;
      continue;
    }
    const std::optional<int> s_bin =
        binarize(schema.sensitive_rule, cells[sensitive_col]);
    const std::optional<int> y_bin = binarize(schema.label_rule, cells[label_col]);
    if (!s_bin || !y_bin) {
      ++dropped;
      continue;
    }
    std::vector<double> row(feature_names.size());
    bool ok = true;
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      if (sensitive_idx && static_cast<Index>(j) == *sensitive_idx) {
        row[j] = static_cast<double>(*s_bin);
        continue;
      }
      const std::optional<double> v = parse_number(cells[feature_cols[j]]);
      if (!v) {
        ok = false;
        break;
      }
      row[j] = *v;
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
    s_vals.push_back(*s_bin);
    y_vals.push_back(*y_bin);
  }

  if (rows.empty())
    throw EmptyAfterFiltering("load_csv: no usable rows in '" + path + "' (" +
                              std::to_string(dropped) + " dropped)");

  // Seeded uniform down-sampling, applied before group ordering.
  if (schema.max_rows && static_cast<Index>(rows.size()) > *schema.max_rows) {
    std::vector<Index> keep(rows.size());
    std::iota(keep.begin(), keep.end(), Index{0});
    rng::Engine eng(rng::derive_seed(schema.subsample_seed, 0xd05a));
    rng::shuffle(keep, eng);
    keep.resize(static_cast<std::size_t>(*schema.max_rows));
    std::sort(keep.begin(), keep.end());
    std::vector<std::vector<double>> rows2;
    std::vector<int> s2, y2;
    rows2.reserve(keep.size());
    for (Index idx : keep) {
      rows2.push_back(std::move(rows[static_cast<std::size_t>(idx)]));
      s2.push_back(s_vals[static_cast<std::size_t>(idx)]);
      y2.push_back(y_vals[static_cast<std::size_t>(idx)]);
    }
    rows = std::move(rows2);
    s_vals = std::move(s2);
    y_vals = std::move(y2);
  }

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(feature_names.size());
  Matrix features(n, d);
  VectorXi s(n), y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j)
      features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    s[i] = s_vals[static_cast<std::size_t>(i)];
    y[i] = y_vals[static_cast<std::size_t>(i)];
  }

  Dataset ds;
  ds.features = std::move(features);
  ds.s = std::move(s);
  ds.y = std::move(y);
  ds.feature_names = std::move(feature_names);
  ds.sensitive_feature_index = sensitive_idx;
  ds.provenance = path + "#" + schema_fingerprint(schema);
  ds.dropped_rows = dropped;
  reorder_groups(ds.features, ds.s, ds.y, ds.n_u);

  if (ds.n_u == 0 || ds.n_u == ds.n())
    throw DegenerateGroup("load_csv: all rows fell in one group (n_u=" +
                          std::to_string(ds.n_u) + " of " +
                          std::to_string(ds.n()) + ")");
  return ds;
}

Dataset from_arrays(Matrix features, VectorXi s, VectorXi y,
                    std::vector<std::string> feature_names,
                    std::optional<Index> sensitive_feature_index,
                    std::string provenance) {
  const Index n = features.rows();
  if (s.size() != n || y.size() != n)
    throw DimensionMismatch("from_arrays: rows " + std::to_string(n) +
                            " vs s " + std::to_string(s.size()) + " vs y " +
                            std::to_string(y.size()));
  for (Index i = 0; i < n; ++i) {
    if (s[i] != 0 && s[i] != 1)
      throw NonBinaryOutcome("from_arrays: s[" + std::to_string(i) + "] = " +
                             std::to_string(s[i]));
    if (y[i] != 0 && y[i] != 1)
      throw NonBinaryOutcome("from_arrays: y[" + std::to_string(i) + "] = " +
                             std::to_string(y[i]));
  }
  if (!features.allFinite())
    throw NonFinite("from_arrays: features contain NaN/Inf");
  Dataset ds;
  ds.features = std::move(features);
  ds.s = std::move(s);
  ds.y = std::move(y);
  ds.feature_names = std::move(feature_names);
  ds.sensitive_feature_index = sensitive_feature_index;
  ds.provenance = std::move(provenance);
  reorder_groups(ds.features, ds.s, ds.y, ds.n_u);
  return ds;
}

ScalerParams fit_scaler(const Dataset& train) {
  const Index d = train.dim();
  const double n = static_cast<double>(train.n());
  if (train.n() == 0) throw EmptyInput("fit_scaler: empty training set");
  ScalerParams params;
  params.mean = train.features.colwise().mean().transpose();
  params.std.resize(d);
  for (Index j = 0; j < d; ++j) {
    const double var =
        (train.features.col(j).array() - params.mean[j]).square().sum() / n;
    params.std[j] = std::sqrt(var);
  }
  params.skip_index = train.sensitive_feature_index;
  return params;
}

Dataset apply_scaler(const Dataset& ds, const ScalerParams& params) {
  if (params.mean.size() != ds.dim())
    throw DimensionMismatch("apply_scaler: scaler dim " +
                            std::to_string(params.mean.size()) + " vs data " +
                            std::to_string(ds.dim()));
  Dataset out = ds;
  for (Index j = 0; j < ds.dim(); ++j) {
    if (params.skip_index && *params.skip_index == j) continue;
    if (params.std[j] == 0.0) {
      out.features.col(j).setZero();
    } else {
      out.features.col(j) =
          (ds.features.col(j).array() - params.mean[j]) / params.std[j];
    }
  }
  return out;
}

std::tuple<Dataset, Dataset, ScalerParams> standardize(const Dataset& train,
                                                       const Dataset& test) {
  if (train.dim() != test.dim())
    throw DimensionMismatch("standardize: feature dims differ");
  const ScalerParams params = fit_scaler(train);
  return {apply_scaler(train, params), apply_scaler(test, params), params};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidConfig("split: test_fraction must be in (0, 1)");
  const Index n = ds.n();
  const Index n_test =
      static_cast<Index>(std::floor(static_cast<double>(n) * test_fraction));
  if (n_test < 1 || n_test >= n)
    throw DegenerateSplit("split: test size " + std::to_string(n_test) +
                          " of " + std::to_string(n) + " is degenerate");

  for (int attempt = 0; attempt < 100; ++attempt) {
    rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    rng::shuffle(order, eng);

    std::vector<Index> test_rows(order.begin(), order.begin() + n_test);
    std::vector<Index> train_rows(order.begin() + n_test, order.end());
    Dataset train = take_rows(ds, train_rows);
    Dataset test = take_rows(ds, test_rows);
    if (has_both_groups_and_labels(train) && has_both_groups_and_labels(test))
      return {std::move(train), std::move(test)};
  }
  throw DegenerateSplit(
      "split: no valid split after 100 attempts (groups or labels too "
      "scarce)");
}

}  // namespace fairkr::data
