// fairkr command line: schema checking, single fits, single trials, the full
// multi-trial experiment protocol, and kernel / embedding-count sweeps.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fairkr/harness.hpp"

namespace {

using namespace fairkr;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw InvalidConfig("empty numeric list '" + text + "'");
  return out;
}

harness::KRule parse_k_rule(const std::string& text) {
  if (text.rfind("n/", 0) == 0)
    return harness::KRule::fraction(std::stoi(text.substr(2)));
  if (text.rfind("abs:", 0) == 0)
    return harness::KRule::absolute(std::stoll(text.substr(4)));
  return harness::KRule::absolute(std::stoll(text));
}

struct CommonOpts {
  std::string data_path;
  std::string schema_path;
  std::string kernel = "polynomial";
  int degree = 4;
  double coef = 0.1;
  double gain = 0.0;  // 0 = 1/feature-dim for sigmoid/rbf
  std::string method = "fkrf2e";
  std::string k_rule = "n/250";
  double gamma = 1.0;
  double mu = 1.0;
  double lambda = 1.0;
  std::string md_mode = "rank-one-md";
  double threshold = 0.5;
  bool no_standardize = false;
  double jitter = -1.0;
  std::uint64_t seed = 0;
  int trials = 50;
  double test_fraction = 0.25;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool with_protocol) {
  cmd->add_option("--data", opts.data_path, "input CSV path")->required();
  cmd->add_option("--schema", opts.schema_path, "dataset schema JSON")->required();
  cmd->add_option("--kernel", opts.kernel,
                  "kernel family: linear|polynomial|sigmoid|rbf");
  cmd->add_option("--degree", opts.degree, "polynomial degree");
  cmd->add_option("--coef", opts.coef, "polynomial/sigmoid additive coefficient");
  cmd->add_option("--gain", opts.gain,
                  "sigmoid/rbf gain (0 = 1/feature-dim default)");
  cmd->add_option("--method", opts.method, "fkrf2e|fkrr");
  cmd->add_option("--k-rule", opts.k_rule,
                  "embedding count: n/250-style fraction or abs:K");
  cmd->add_option("--gamma", opts.gamma, "ridge regularization");
  cmd->add_option("--mu", opts.mu, "fkrr correlation penalty");
  cmd->add_option("--lambda", opts.lambda, "fkrr complexity penalty");
  cmd->add_option("--md-mode", opts.md_mode, "rank-one-md|paper-eq19");
  cmd->add_option("--threshold", opts.threshold, "decision threshold");
  cmd->add_flag("--no-standardize", opts.no_standardize,
                "disable train-fitted z-scoring");
  cmd->add_option("--jitter", opts.jitter,
                  "gram jitter (negative = scale-aware default)");
  cmd->add_option("--seed", opts.seed, "base seed");
  if (with_protocol) {
    cmd->add_option("--trials", opts.trials, "number of random trials");
    cmd->add_option("--test-fraction", opts.test_fraction,
                    "held-out fraction per trial");
  }
}

kernels::KernelSpec kernel_from_opts(const CommonOpts& opts) {
  kernels::KernelSpec spec;
  spec.family = kernels::kernel_family_from_string(opts.kernel);
  spec.degree = opts.degree;
  spec.coef = opts.coef;
  spec.gain = opts.gain;
  if (spec.family == kernels::KernelFamily::Sigmoid && opts.coef == 0.1)
    spec.coef = 0.01;
  return spec;
}

harness::ExperimentConfig config_from_opts(const CommonOpts& opts) {
  harness::ExperimentConfig cfg;
  cfg.dataset_path = opts.data_path;
  cfg.method = harness::method_from_string(opts.method);
  cfg.kernel_grid = {kernel_from_opts(opts)};
  cfg.k_grid = {parse_k_rule(opts.k_rule)};
  cfg.gamma_grid = {opts.gamma};
  cfg.mu_grid = {opts.mu};
  cfg.lambda_grid = {opts.lambda};
  cfg.trials = opts.trials;
  cfg.test_fraction = opts.test_fraction;
  cfg.seed = opts.seed;
  cfg.md_mode = embedding::md_mode_from_string(opts.md_mode);
  cfg.threshold = opts.threshold;
  cfg.standardize_features = !opts.no_standardize;
  cfg.jitter = opts.jitter;
  return cfg;
}

data::DatasetSchema load_schema(const std::string& path) {
  return serialize::schema_from_json(serialize::read_json_file(path));
}

std::string resolve_out_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("FAIRKR_OUT_DIR"); env && *env)
    return env;
  return flag_value;
}

int cmd_load_check(const std::string& data_path, const std::string& schema_path) {
  const data::DatasetSchema schema = load_schema(schema_path);
  const data::Dataset ds = data::load_csv(data_path, schema);
  serialize::json summary{
      {"path", data_path},
      {"n", ds.n()},
      {"dim", ds.dim()},
      {"n_u", ds.n_u},
      {"n_p", ds.n_p()},
      {"dropped_rows", ds.dropped_rows},
      {"positive_rate", ds.y.cast<double>().mean()},
      {"feature_names", ds.feature_names},
      {"provenance", ds.provenance}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_fit(const CommonOpts& opts, bool standardize_full,
            const std::string& out_path) {
  const data::DatasetSchema schema = load_schema(opts.schema_path);
  data::Dataset ds = data::load_csv(opts.data_path, schema);
  if (standardize_full) ds = data::apply_scaler(ds, data::fit_scaler(ds));
  const kernels::KernelSpec spec =
      kernels::resolve_gain(kernel_from_opts(opts), ds.dim());
  const Vector y = ds.y.cast<double>();

  serialize::json doc;
  if (harness::method_from_string(opts.method) == harness::Method::FKRF2E) {
    const Index k = parse_k_rule(opts.k_rule).resolve(ds.n());
    const regression::FairRegressor model = regression::fit_fair_regressor(
        ds.features, ds.n_u, y, spec, k,
        embedding::md_mode_from_string(opts.md_mode), opts.jitter, opts.gamma,
        opts.threshold);
    doc = serialize::to_json(model);
  } else {
    const regression::FkrrModel model = regression::fit_fkrr(
        ds.features, ds.s, y, spec, opts.mu, opts.lambda, opts.threshold);
    doc = serialize::to_json(model);
  }
  serialize::write_json_file(out_path, doc);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int cmd_eval(const CommonOpts& opts, int trial_index) {
  harness::ExperimentConfig cfg = config_from_opts(opts);
  cfg.schema = load_schema(opts.schema_path);
  cfg.validate();
  const data::Dataset ds = data::load_csv(cfg.dataset_path, cfg.schema);
  const metrics::TrialReport report = harness::run_trial(ds, cfg, trial_index);
  serialize::json j{{"trial_index", trial_index},
                    {"seed", report.seed},
                    {"sd", report.sd},
                    {"error", report.error},
                    {"n_test", report.n_test}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_and_emit(const harness::ExperimentConfig& cfg,
                 const std::string& out_dir) {
  const harness::ExperimentReport report = harness::run_experiment(cfg);
  harness::emit_results(report, out_dir);
  std::cout << "grid points: " << report.points.size()
            << ", best index: " << report.best_index << '\n';
  if (report.best_index >= 0) {
    const auto& best =
        report.points[static_cast<std::size_t>(report.best_index)];
    std::cout << "best: sd_mean=" << serialize::format_double(best.agg.sd_mean)
              << " error_mean="
              << serialize::format_double(best.agg.error_mean) << '\n';
  }
  std::cout << "wrote " << out_dir << "/results.csv, trials.csv, run.json\n";
  return 0;
}

int cmd_experiment(const CommonOpts& opts, const std::string& config_path,
                   const std::string& from_run, const std::string& out_dir_flag,
                   const std::string& gamma_grid, const std::string& mu_grid,
                   const std::string& lambda_grid) {
  harness::ExperimentConfig cfg;
  if (!from_run.empty()) {
    cfg = harness::config_from_run_file(from_run);
  } else if (!config_path.empty()) {
    cfg = harness::config_from_json(serialize::read_json_file(config_path));
  } else {
    cfg = config_from_opts(opts);
    cfg.schema = load_schema(opts.schema_path);
    if (!gamma_grid.empty()) cfg.gamma_grid = parse_double_list(gamma_grid);
    if (!mu_grid.empty()) cfg.mu_grid = parse_double_list(mu_grid);
    if (!lambda_grid.empty()) cfg.lambda_grid = parse_double_list(lambda_grid);
  }
  cfg.validate();
  return run_and_emit(cfg, resolve_out_dir(out_dir_flag));
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis,
              const std::string& kernels_list, const std::string& out_dir_flag) {
  harness::ExperimentConfig cfg = config_from_opts(opts);
  cfg.schema = load_schema(opts.schema_path);
  if (axis == "k") {
    cfg.k_grid = {harness::KRule::fraction(250), harness::KRule::fraction(200),
                  harness::KRule::fraction(150), harness::KRule::fraction(100)};
  } else if (axis == "kernel") {
    cfg.kernel_grid.clear();
    std::stringstream ss(kernels_list);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      kernels::KernelSpec spec = kernel_from_opts(opts);
      spec.family = kernels::kernel_family_from_string(name);
      if (spec.family == kernels::KernelFamily::Sigmoid) spec.coef = 0.01;
      cfg.kernel_grid.push_back(spec);
    }
    if (cfg.kernel_grid.empty())
      throw InvalidConfig("sweep: --kernels list is empty");
  } else {
    throw InvalidConfig("sweep: --axis must be 'k' or 'kernel'");
  }
  cfg.validate();
  return run_and_emit(cfg, resolve_out_dir(out_dir_flag));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair kernel regression via fair feature embeddings"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* load_check = app.add_subcommand(
      "load-check", "validate a CSV against a schema and print a summary");
  std::string lc_data, lc_schema;
  load_check->add_option("--data", lc_data, "input CSV path")->required();
  load_check->add_option("--schema", lc_schema, "dataset schema JSON")->required();

  auto* fit = app.add_subcommand("fit", "fit one model on the full dataset "
                                        "and serialize it");
  add_common_flags(fit, opts, false);
  std::string fit_out = "model.json";
  bool fit_standardize = false;
  fit->add_option("--out", fit_out, "output model path");
  fit->add_flag("--standardize", fit_standardize,
                "z-score the dataset before fitting (stored features are "
                "then standardized)");

  auto* eval = app.add_subcommand("eval", "run a single randomized trial");
  add_common_flags(eval, opts, true);
  int trial_index = 0;
  eval->add_option("--trial", trial_index, "trial index (derives the seed)");

  auto* experiment =
      app.add_subcommand("experiment", "full multi-trial protocol over a "
                                       "hyperparameter grid");
  add_common_flags(experiment, opts, true);
  std::string config_path, from_run, exp_out = "results";
  std::string gamma_grid, mu_grid, lambda_grid;
  experiment->add_option("--config", config_path,
                         "experiment config JSON (overrides flags)");
  experiment->add_option("--from-run", from_run,
                         "rerun exactly from an emitted run.json");
  experiment->add_option("--out", exp_out,
                         "output directory (FAIRKR_OUT_DIR overrides)");
  experiment->add_option("--gamma-grid", gamma_grid, "comma list of gammas");
  experiment->add_option("--mu-grid", mu_grid, "comma list of mus");
  experiment->add_option("--lambda-grid", lambda_grid, "comma list of lambdas");
  experiment->get_option("--data")->required(false);
  experiment->get_option("--schema")->required(false);

  auto* sweep = app.add_subcommand(
      "sweep", "sensitivity sweep over k (n/250..n/100) or kernel family");
  add_common_flags(sweep, opts, true);
  std::string axis = "k", kernels_list = "linear,polynomial,sigmoid,rbf";
  std::string sweep_out = "sweep";
  sweep->add_option("--axis", axis, "k|kernel");
  sweep->add_option("--kernels", kernels_list,
                    "comma list of families for --axis kernel");
  sweep->add_option("--out", sweep_out,
                    "output directory (FAIRKR_OUT_DIR overrides)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (load_check->parsed()) return cmd_load_check(lc_data, lc_schema);
    if (fit->parsed()) return cmd_fit(opts, fit_standardize, fit_out);
    if (eval->parsed()) return cmd_eval(opts, trial_index);
    if (experiment->parsed()) {
      if (from_run.empty() && config_path.empty() &&
          (opts.data_path.empty() || opts.schema_path.empty()))
        throw InvalidConfig(
            "experiment: provide --config, --from-run, or --data + --schema");
      return cmd_experiment(opts, config_path, from_run, exp_out, gamma_grid,
                            mu_grid, lambda_grid);
    }
    if (sweep->parsed()) return cmd_sweep(opts, axis, kernels_list, sweep_out);
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const MissingColumn& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
