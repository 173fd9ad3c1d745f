#include "fairkr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "fairkr/rng.hpp"

namespace fairkr::harness {

namespace {

constexpr std::uint64_t kRetryStream = 0x52455452ULL;  // retry seed tag

[[noreturn]] void rethrow_annotated(const Error& e, const std::string& prefix) {
  const std::string msg = prefix + e.what();
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) throw NotPositiveDefinite(msg);
  if (dynamic_cast<const ConvergenceFailure*>(&e)) throw ConvergenceFailure(msg);
  if (dynamic_cast<const DimensionMismatch*>(&e)) throw DimensionMismatch(msg);
  if (dynamic_cast<const NonFinite*>(&e)) throw NonFinite(msg);
  if (dynamic_cast<const DegenerateGroup*>(&e)) throw DegenerateGroup(msg);
  if (dynamic_cast<const KTooLarge*>(&e)) throw KTooLarge(msg);
  if (dynamic_cast<const DegenerateSplit*>(&e)) throw DegenerateSplit(msg);
  if (dynamic_cast<const InvalidConfig*>(&e)) throw InvalidConfig(msg);
  if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
  throw Error(msg);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string to_string(Method method) {
  return method == Method::FKRF2E ? "fkrf2e" : "fkrr";
}

Method method_from_string(const std::string& name) {
  if (name == "fkrf2e") return Method::FKRF2E;
  if (name == "fkrr") return Method::FKRR;
  throw InvalidConfig("unknown method '" + name + "'");
}

Index KRule::resolve(Index n_train) const {
  if (kind == Kind::Absolute) {
    if (value < 1) throw InvalidConfig("k rule: absolute k must be >= 1");
    return value;
  }
  if (denominator < 1) throw InvalidConfig("k rule: denominator must be >= 1");
  const Index k = static_cast<Index>(std::ceil(
      static_cast<double>(n_train) / static_cast<double>(denominator)));
  return std::max<Index>(1, k);
}

std::string KRule::label() const {
  if (kind == Kind::Absolute) return "abs:" + std::to_string(value);
  return "n/" + std::to_string(denominator);
}

void ExperimentConfig::validate() const {
  schema.validate();
  if (kernel_grid.empty()) throw InvalidConfig("config: kernel grid is empty");
  if (method == Method::FKRF2E) {
    if (k_grid.empty()) throw InvalidConfig("config: k grid is empty");
    if (gamma_grid.empty()) throw InvalidConfig("config: gamma grid is empty");
    for (double g : gamma_grid)
      if (g < 0.0) throw InvalidConfig("config: gamma must be >= 0");
  } else {
    if (mu_grid.empty()) throw InvalidConfig("config: mu grid is empty");
    if (lambda_grid.empty()) throw InvalidConfig("config: lambda grid is empty");
    for (double m : mu_grid)
      if (m < 0.0) throw InvalidConfig("config: mu must be >= 0");
    for (double l : lambda_grid)
      if (l < 0.0) throw InvalidConfig("config: lambda must be >= 0");
  }
  if (trials < 1) throw InvalidConfig("config: trials must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidConfig("config: test_fraction must be in (0, 1)");
  if (!std::isfinite(threshold))
    throw InvalidConfig("config: threshold must be finite");
}

serialize::json config_to_json(const ExperimentConfig& cfg) {
  using serialize::json;
  json kernels_j = json::array();
  for (const auto& k : cfg.kernel_grid) kernels_j.push_back(serialize::to_json(k));
  json krules_j = json::array();
  for (const auto& r : cfg.k_grid) {
    if (r.kind == KRule::Kind::Fraction)
      krules_j.push_back(json{{"kind", "fraction"}, {"denominator", r.denominator}});
    else
      krules_j.push_back(json{{"kind", "absolute"}, {"value", r.value}});
  }
  return json{{"dataset_path", cfg.dataset_path},
              {"schema", serialize::to_json(cfg.schema)},
              {"method", to_string(cfg.method)},
              {"kernel_grid", std::move(kernels_j)},
              {"k_grid", std::move(krules_j)},
              {"gamma_grid", cfg.gamma_grid},
              {"mu_grid", cfg.mu_grid},
              {"lambda_grid", cfg.lambda_grid},
              {"trials", cfg.trials},
              {"test_fraction", cfg.test_fraction},
              {"seed", cfg.seed},
              {"md_mode", embedding::to_string(cfg.md_mode)},
              {"threshold", cfg.threshold},
              {"standardize", cfg.standardize_features},
              {"jitter", cfg.jitter}};
}

ExperimentConfig config_from_json(const serialize::json& j) {
  ExperimentConfig cfg;
  cfg.dataset_path = j.at("dataset_path").get<std::string>();
  cfg.schema = serialize::schema_from_json(j.at("schema"));
  cfg.method = method_from_string(j.at("method").get<std::string>());
  cfg.kernel_grid.clear();
  for (const auto& k : j.at("kernel_grid"))
    cfg.kernel_grid.push_back(serialize::kernel_spec_from_json(k));
  cfg.k_grid.clear();
  for (const auto& r : j.at("k_grid")) {
    const std::string kind = r.at("kind").get<std::string>();
    if (kind == "fraction")
      cfg.k_grid.push_back(KRule::fraction(r.at("denominator").get<int>()));
    else if (kind == "absolute")
      cfg.k_grid.push_back(KRule::absolute(r.at("value").get<Index>()));
    else
      throw InvalidConfig("config: unknown k rule kind '" + kind + "'");
  }
  cfg.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
  cfg.mu_grid = j.at("mu_grid").get<std::vector<double>>();
  cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  cfg.trials = j.at("trials").get<int>();
  cfg.test_fraction = j.at("test_fraction").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.md_mode = embedding::md_mode_from_string(j.at("md_mode").get<std::string>());
  cfg.threshold = j.value("threshold", 0.5);
  cfg.standardize_features = j.value("standardize", true);
  cfg.jitter = j.value("jitter", -1.0);
  cfg.validate();
  return cfg;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<GridPoint> points;
  if (cfg.method == Method::FKRF2E) {
    for (const auto& kernel : cfg.kernel_grid)
      for (const auto& rule : cfg.k_grid)
        for (double gamma : cfg.gamma_grid) {
          GridPoint pt;
          pt.kernel = kernel;
          pt.k_rule = rule;
          pt.gamma = gamma;
          points.push_back(pt);
        }
  } else {
    for (const auto& kernel : cfg.kernel_grid)
      for (double mu : cfg.mu_grid)
        for (double lambda : cfg.lambda_grid) {
          GridPoint pt;
          pt.kernel = kernel;
          pt.mu = mu;
          pt.lambda = lambda;
          points.push_back(pt);
        }
  }
  return points;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial_index) {
  return rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(trial_index));
}

metrics::TrialReport run_trial(const data::Dataset& ds,
                               const ExperimentConfig& cfg,
                               const GridPoint& point, std::uint64_t seed,
                               int trial_index) {
  try {
    auto [train, test] = data::split(ds, cfg.test_fraction, seed);
    if (cfg.standardize_features) {
      auto [train_z, test_z, params] = data::standardize(train, test);
      train = std::move(train_z);
      test = std::move(test_z);
    }
    const kernels::KernelSpec spec =
        kernels::resolve_gain(point.kernel, train.dim());
    const Vector y_train = train.y.cast<double>();

    regression::VectorXi pred;
    if (cfg.method == Method::FKRF2E) {
      const Index k = point.k_rule.resolve(train.n());
      const regression::FairRegressor model = regression::fit_fair_regressor(
          train.features, train.n_u, y_train, spec, k, cfg.md_mode, cfg.jitter,
          point.gamma, cfg.threshold);
      pred = regression::classify(regression::predict(model, test.features),
                                  cfg.threshold);
    } else {
      const regression::FkrrModel model =
          regression::fit_fkrr(train.features, train.s, y_train, spec,
                               point.mu, point.lambda, cfg.threshold);
      pred = regression::classify(regression::predict(model, test.features),
                                  cfg.threshold);
    }

    metrics::TrialReport report;
    report.sd = metrics::statistical_disparity(pred, test.s);
    report.error = metrics::classification_error(pred, test.y);
    report.n_test = test.n();
    report.seed = seed;
    return report;
  } catch (const Error& e) {
    rethrow_annotated(e, "trial " + std::to_string(trial_index) + ": ");
  }
}

metrics::TrialReport run_trial(const data::Dataset& ds,
                               const ExperimentConfig& cfg, int trial_index) {
  const std::vector<GridPoint> points = expand_grid(cfg);
  if (points.size() != 1)
    throw InvalidConfig("run_trial: config expands to " +
                        std::to_string(points.size()) +
                        " grid points; a single trial needs exactly one");
  return run_trial(ds, cfg, points[0], trial_seed(cfg, trial_index),
                   trial_index);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const data::Dataset& ds) {
  const std::vector<GridPoint> points = expand_grid(cfg);

  ExperimentReport report;
  report.config = cfg;
  report.dataset_n = ds.n();
  report.dataset_dim = ds.dim();
  report.dataset_n_u = ds.n_u;

  for (const GridPoint& point : points) {
    GridPointResult result;
    result.point = point;
    if (cfg.method == Method::FKRF2E) {
      const Index n_test = static_cast<Index>(
          std::floor(static_cast<double>(ds.n()) * cfg.test_fraction));
      result.resolved_k = point.k_rule.resolve(ds.n() - n_test);
    }
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t seed = trial_seed(cfg, t);
      try {
        result.trials.push_back(run_trial(ds, cfg, point, seed, t));
      } catch (const Error& first_error) {
        const std::uint64_t retry = rng::derive_seed(seed, kRetryStream);
        try {
          result.trials.push_back(run_trial(ds, cfg, point, retry, t));
          result.retried_trials.push_back(t);
        } catch (const Error& second_error) {
          result.failures.push_back(
              {t, std::string(first_error.what()) + "; retry: " +
                      second_error.what()});
        }
      }
    }
    const std::size_t failed = result.failures.size();
    result.valid =
        !result.trials.empty() &&
        10 * failed <= static_cast<std::size_t>(cfg.trials);
    if (!result.trials.empty()) result.agg = metrics::aggregate(result.trials);
    report.points.push_back(std::move(result));
  }

  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const GridPointResult& r = report.points[i];
    if (!r.valid) continue;
    if (report.best_index < 0) {
      report.best_index = static_cast<int>(i);
      continue;
    }
    const GridPointResult& best = report.points[static_cast<std::size_t>(report.best_index)];
    if (r.agg.sd_mean < best.agg.sd_mean ||
        (r.agg.sd_mean == best.agg.sd_mean &&
         r.agg.error_mean < best.agg.error_mean))
      report.best_index = static_cast<int>(i);
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const data::Dataset ds = data::load_csv(cfg.dataset_path, cfg.schema);
  return run_experiment(cfg, ds);
}

void emit_results(const ExperimentReport& report, const std::string& out_dir) {
  using serialize::format_double;
  if (report.points.empty())
    throw InvalidConfig("emit_results: empty grid, nothing to write");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("emit_results: cannot create '" + out_dir +
                  "': " + ec.message());

  const bool fkrf2e = report.config.method == Method::FKRF2E;

  {
    const std::string path = out_dir + "/results.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_results: cannot open '" + path + "'");
    out << "method,kernel_family,degree,coef,gain,k_rule,k,gamma,mu,lambda,"
           "sd_mean,sd_std,error_mean,error_std,n_trials,n_failed,valid,best\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
      const GridPointResult& r = report.points[i];
      const kernels::KernelSpec& k = r.point.kernel;
      out << to_string(report.config.method) << ','
          << kernels::to_string(k.family) << ',';
      if (k.family == kernels::KernelFamily::Polynomial)
        out << k.degree << ',' << format_double(k.coef) << ',';
      else if (k.family == kernels::KernelFamily::Sigmoid)
        out << ',' << format_double(k.coef) << ',';
      else
        out << ",,";
      if (k.family == kernels::KernelFamily::Sigmoid ||
          k.family == kernels::KernelFamily::RBF)
        out << format_double(k.gain) << ',';
      else
        out << ',';
      if (fkrf2e)
        out << csv_escape(r.point.k_rule.label()) << ',' << r.resolved_k << ','
            << format_double(r.point.gamma) << ",,,";
      else
        out << ",,," << format_double(r.point.mu) << ','
            << format_double(r.point.lambda) << ',';
      out << format_double(r.agg.sd_mean) << ',' << format_double(r.agg.sd_std)
          << ',' << format_double(r.agg.error_mean) << ','
          << format_double(r.agg.error_std) << ',' << r.agg.n_trials << ','
          << r.failures.size() << ',' << (r.valid ? 1 : 0) << ','
          << (static_cast<int>(i) == report.best_index ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("emit_results: failed writing '" + path + "'");
  }

  {
    const std::string path = out_dir + "/trials.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_results: cannot open '" + path + "'");
    out << "grid_index,trial_index,seed,sd,error,n_test,status\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
      const GridPointResult& r = report.points[i];
      std::size_t cursor = 0;
      for (int t = 0; t < report.config.trials; ++t) {
        const bool failed =
            std::find_if(r.failures.begin(), r.failures.end(),
                         [t](const TrialFailure& f) {
                           return f.trial_index == t;
                         }) != r.failures.end();
        out << i << ',' << t << ',';
        if (failed) {
          out << trial_seed(report.config, t) << ",,,," << "failed\n";
          continue;
        }
        const metrics::TrialReport& tr = r.trials[cursor++];
        const bool retried =
            std::find(r.retried_trials.begin(), r.retried_trials.end(), t) !=
            r.retried_trials.end();
        out << tr.seed << ',' << format_double(tr.sd) << ','
            << format_double(tr.error) << ',' << tr.n_test << ','
            << (retried ? "retried" : "ok") << '\n';
      }
    }
    if (!out) throw IoError("emit_results: failed writing '" + path + "'");
  }

  {
    using serialize::json;
    json seeds = json::array();
    for (int t = 0; t < report.config.trials; ++t)
      seeds.push_back(trial_seed(report.config, t));
    json run{{"format", "fkrf2e-run/1"},
             {"config", config_to_json(report.config)},
             {"trial_seeds", std::move(seeds)},
             {"selection_rule", "min sd_mean, tie-break min error_mean"},
             {"best_index", report.best_index},
             {"dataset",
              json{{"path", report.config.dataset_path},
                   {"n", report.dataset_n},
                   {"dim", report.dataset_dim},
                   {"n_u", report.dataset_n_u}}}};
    serialize::write_json_file(out_dir + "/run.json", run);
  }
}

ExperimentConfig config_from_run_file(const std::string& path) {
  const serialize::json run = serialize::read_json_file(path);
  if (run.value("format", "") != "fkrf2e-run/1")
    throw InvalidConfig("config_from_run_file: '" + path +
                        "' is not a fkrf2e-run/1 document");
  return config_from_json(run.at("config"));
}

}  // namespace fairkr::harness
