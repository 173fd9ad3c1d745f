#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairkr/data.hpp"
#include "fairkr/metrics.hpp"
#include "fairkr/regression.hpp"
#include "fairkr/serialize.hpp"

namespace fairkr::harness {

enum class Method { FKRF2E, FKRR };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

// Number of embedding directions: either a fraction rule k = ceil(n/denom)
// (at least 1, n the training-set size at fit time) or an absolute count.
struct KRule {
  enum class Kind { Fraction, Absolute };
  Kind kind = Kind::Fraction;
  int denominator = 250;
  Index value = 1;

  Index resolve(Index n_train) const;
  std::string label() const;

  static KRule fraction(int denominator) {
    return {Kind::Fraction, denominator, 1};
  }
  static KRule absolute(Index value) { return {Kind::Absolute, 0, value}; }
};

// Full experiment description. Grids multiply out into grid points:
// kernel x k_rule x gamma for FKRF2E, kernel x mu x lambda for FKRR.
// jitter < 0 selects the scale-aware default at fit time.
struct ExperimentConfig {
  std::string dataset_path;
  data::DatasetSchema schema;
  Method method = Method::FKRF2E;
  std::vector<kernels::KernelSpec> kernel_grid = {kernels::KernelSpec::polynomial()};
  std::vector<KRule> k_grid = {KRule::fraction(250)};
  std::vector<double> gamma_grid = {1.0};
  std::vector<double> mu_grid = {1.0};
  std::vector<double> lambda_grid = {1.0};
  int trials = 50;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
  embedding::MdMatrixMode md_mode = embedding::MdMatrixMode::RankOneMD;
  double threshold = 0.5;
  bool standardize_features = true;
  double jitter = -1.0;

  void validate() const;
};

serialize::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const serialize::json& j);

// One resolved hyperparameter combination.
struct GridPoint {
  kernels::KernelSpec kernel;
  KRule k_rule;
  double gamma = 1.0;
  double mu = 1.0;
  double lambda = 1.0;
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

struct TrialFailure {
  int trial_index = 0;
  std::string message;
};

struct GridPointResult {
  GridPoint point;
  Index resolved_k = 0;  // 0 when method is FKRR
  metrics::AggregateReport agg;
  std::vector<metrics::TrialReport> trials;
  std::vector<int> retried_trials;
  std::vector<TrialFailure> failures;
  bool valid = true;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<GridPointResult> points;
  int best_index = -1;  // -1 when no valid point exists
  Index dataset_n = 0;
  Index dataset_dim = 0;
  Index dataset_n_u = 0;
};

// Per-trial seed; depends only on the config seed and trial index so grid
// points share splits and removing one point never shifts another.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial_index);

// Runs one trial at one grid point with an explicit seed:
// split -> standardize -> fit -> predict -> classify -> report.
metrics::TrialReport run_trial(const data::Dataset& ds,
                               const ExperimentConfig& cfg,
                               const GridPoint& point, std::uint64_t seed,
                               int trial_index);

// Spec-level single-trial entry: requires a one-point grid.
metrics::TrialReport run_trial(const data::Dataset& ds,
                               const ExperimentConfig& cfg, int trial_index);

// Full protocol over the expanded grid. A failed trial is retried once with
// a derived seed; a grid point with more than 10% failed trials is invalid.
// Best point: minimal sd_mean, error_mean as tiebreaker, first on equality.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const data::Dataset& ds);

// Loads the dataset from cfg.dataset_path with cfg.schema, then runs.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes results.csv (one row per grid point), trials.csv (one row per
// trial), and run.json (resolved config + seeds) into out_dir.
void emit_results(const ExperimentReport& report, const std::string& out_dir);

// Reconstructs the config embedded in a run.json document.
ExperimentConfig config_from_run_file(const std::string& path);

}  // namespace fairkr::harness
