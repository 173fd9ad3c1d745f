#pragma once

#include <cstdint>
#include <vector>

#include "fairkr/numerics.hpp"

namespace fairkr::metrics {

using VectorXi = Eigen::VectorXi;

// One randomized trial's fairness/accuracy outcome.
struct TrialReport {
  double sd = 0.0;
  double error = 0.0;
  Index n_test = 0;
  std::uint64_t seed = 0;
};

// Mean and sample standard deviation (n-1 denominator) over trials. With a
// single trial the std is reported as 0 and degenerate_std is set.
struct AggregateReport {
  double sd_mean = 0.0;
  double sd_std = 0.0;
  double error_mean = 0.0;
  double error_std = 0.0;
  std::size_t n_trials = 0;
  bool degenerate_std = false;
};

// |p(pred=1 | s=1) - p(pred=1 | s=0)|. Both groups must be present.
double statistical_disparity(const VectorXi& pred, const VectorXi& s);

// Fraction of mismatched labels.
double classification_error(const VectorXi& pred, const VectorXi& y);

// Squared Euclidean distance between the group mean rows of an embedded
// sample matrix (rows [0, n_u) versus the rest).
double mean_discrepancy_embedded(const Matrix& x_fs, Index n_u);

AggregateReport aggregate(const std::vector<TrialReport>& reports);

}  // namespace fairkr::metrics
