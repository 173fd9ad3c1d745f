#include "fairkr/metrics.hpp"

#include <cmath>

namespace fairkr::metrics {

namespace {

void require_binary(const VectorXi& v, const char* name) {
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0 && v[i] != 1)
      throw NonBinaryOutcome(std::string(name) + " contains value " +
                             std::to_string(v[i]) + " at index " +
                             std::to_string(i));
}

}  // namespace

double statistical_disparity(const VectorXi& pred, const VectorXi& s) {
  if (pred.size() != s.size())
    throw DimensionMismatch("statistical_disparity: sizes " +
                            std::to_string(pred.size()) + " vs " +
                            std::to_string(s.size()));
  require_binary(pred, "pred");
  require_binary(s, "s");
  Index pos_u = 0, pos_p = 0, count_u = 0, count_p = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] == 1) {
      ++count_p;
      pos_p += pred[i];
    } else {
      ++count_u;
      pos_u += pred[i];
    }
  }
  if (count_u == 0 || count_p == 0)
    throw DegenerateGroup("statistical_disparity: a group is empty (n_u=" +
                          std::to_string(count_u) + ", n_p=" +
                          std::to_string(count_p) + ")");
  return std::abs(static_cast<double>(pos_p) / static_cast<double>(count_p) -
                  static_cast<double>(pos_u) / static_cast<double>(count_u));
}

double classification_error(const VectorXi& pred, const VectorXi& y) {
  if (pred.size() != y.size())
    throw DimensionMismatch("classification_error: sizes " +
                            std::to_string(pred.size()) + " vs " +
                            std::to_string(y.size()));
  if (pred.size() == 0) throw EmptyInput("classification_error: empty input");
  Index mismatches = 0;
  for (Index i = 0; i < pred.size(); ++i)
    if (pred[i] != y[i]) ++mismatches;
  return static_cast<double>(mismatches) / static_cast<double>(pred.size());
}

double mean_discrepancy_embedded(const Matrix& x_fs, Index n_u) {
  const Index n = x_fs.rows();
  if (n_u < 1 || n_u >= n)
    throw DegenerateGroup("mean_discrepancy_embedded: need 1 <= n_u < n");
  const Vector mean_u =
      x_fs.topRows(n_u).colwise().mean().transpose();
  const Vector mean_p =
      x_fs.bottomRows(n - n_u).colwise().mean().transpose();
  return (mean_u - mean_p).squaredNorm();
}

AggregateReport aggregate(const std::vector<TrialReport>& reports) {
  if (reports.empty()) throw EmptyInput("aggregate: no reports");
  AggregateReport agg;
  agg.n_trials = reports.size();
  for (const TrialReport& r : reports) {
    agg.sd_mean += r.sd;
    agg.error_mean += r.error;
  }
  const double n = static_cast<double>(reports.size());
  agg.sd_mean /= n;
  agg.error_mean /= n;
  if (reports.size() == 1) {
    agg.degenerate_std = true;
    return agg;
  }
  double sd_ss = 0.0, err_ss = 0.0;
  for (const TrialReport& r : reports) {
    sd_ss += (r.sd - agg.sd_mean) * (r.sd - agg.sd_mean);
    err_ss += (r.error - agg.error_mean) * (r.error - agg.error_mean);
  }
  agg.sd_std = std::sqrt(sd_ss / (n - 1.0));
  agg.error_std = std::sqrt(err_ss / (n - 1.0));
  return agg;
}

}  // namespace fairkr::metrics
