#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"
#include "cusploc/estimators.hpp"
#include "cusploc/fbm.hpp"
#include "cusploc/harness/config.hpp"
#include "cusploc/harness/csv.hpp"
#include "cusploc/harness/experiment.hpp"
#include "cusploc/harness/report.hpp"
#include "cusploc/limit.hpp"
#include "cusploc/models.hpp"
#include "cusploc/parallel.hpp"

namespace fs = std::filesystem;
using namespace cusploc;
using namespace cusploc::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  std::string out;
  bool verbose = false;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig c;
  if (!g.config.empty()) c = load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (!g.out.empty()) c.outputs = g.out;
  c.validate();
  return c;
}

// Prints a one-row CSV to stdout and, when --out is given, to dir/name.
void emit_row(const Globals& g, const CsvTable& t, const std::string& name) {
  std::cout << t.str();
  if (!g.out.empty()) {
    ensure_directory(g.out);
    t.write(fs::path(g.out) / name);
  }
}

fs::path out_dir(const ExperimentConfig& c) {
  ensure_directory(c.outputs);
  return c.outputs;
}

void report_files(const std::vector<fs::path>& files) {
  for (const auto& f : files) spdlog::info("wrote {}", f.string());
}

ObservedData read_data(const fs::path& path, const CuspModelSpec& spec) {
  const CsvDocument doc = read_csv(path);
  if (doc.header.size() == 2 && doc.header[0] == "t" && doc.header[1] == "X") {
    const auto t = doc.numbers("t");
    Trajectory tr;
    tr.values = doc.numbers("X");
    if (tr.values.size() < 2) throw DomainError("trajectory needs at least two points");
    tr.t0 = t.front();
    tr.step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (std::abs(t[i] - tr.time(i)) > 1e-9 * std::max(1.0, std::abs(t.back())))
        throw DomainError("trajectory times must be uniformly spaced");
    tr.epsilon = spec.epsilon;
    return tr;
  }
  if (doc.header.size() == 1 && doc.header[0] == "event_time") {
    EventRecord ev;
    ev.events = doc.numbers("event_time");
    ev.tau = spec.tau;
    ev.n_periods = spec.n;
    return ev;
  }
  if (doc.header.size() == 1 && doc.header[0] == "x") return Sample{doc.numbers("x")};
  throw DomainError("unrecognized data header in " + path.string() + " (expected t,X or event_time or x)");
}

CsvTable data_table(const ObservedData& data) {
  if (const auto* tr = std::get_if<Trajectory>(&data)) {
    CsvTable t({"t", "X"});
    for (std::size_t i = 0; i < tr->values.size(); ++i) t.add_row({tr->time(i), tr->values[i]});
    return t;
  }
  if (const auto* ev = std::get_if<EventRecord>(&data)) {
    CsvTable t({"event_time"});
    for (double e : ev->events) t.add_row({e});
    return t;
  }
  CsvTable t({"x"});
  for (double x : std::get<Sample>(data).values) t.add_row({x});
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("cusploc"));
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Cusp-type change-point location estimation: limit processes, models, estimators and rate experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--workers", g.workers, "Worker threads; 0 uses CUSPLOC_WORKERS or the hardware concurrency");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");

  // gamma
  auto* gamma_cmd = app.add_subcommand("gamma", "Print Gamma*, gamma, H and phi for the model as a CSV row");
  std::optional<double> g_kappa, g_a, g_param;
  std::string g_variant;
  gamma_cmd->add_option("--kappa", g_kappa, "Cusp exponent");
  gamma_cmd->add_option("--a", g_a, "Cusp amplitude");
  gamma_cmd->add_option("--variant", g_variant, "Model variant");
  gamma_cmd->add_option("--parameter", g_param, "Asymptotic parameter (eps, n or T) for phi");

  // fbm
  auto* fbm_cmd = app.add_subcommand("fbm", "Sample fractional Brownian motion paths on a symmetric grid");
  double f_hurst = 0.5, f_half = 2.0;
  std::size_t f_points = 33, f_draws = 1;
  std::string f_method = "exact";
  fbm_cmd->add_option("--hurst", f_hurst, "Hurst parameter")->required();
  fbm_cmd->add_option("--points", f_points, "Odd number of grid points");
  fbm_cmd->add_option("--half-width", f_half, "Grid covers [-w, w]");
  fbm_cmd->add_option("--draws", f_draws, "Number of paths")->check(CLI::PositiveNumber);
  fbm_cmd->add_option("--method", f_method, "exact or ma")->check(CLI::IsMember({"exact", "ma"}));

  // limit
  auto* limit_cmd = app.add_subcommand("limit", "Moments and densities of the limit estimators");
  double l_hurst = 0.5, l_gamma = 1.0;
  std::size_t l_reps = 1000, l_grid = kDefaultLimitGridSize, l_bins = 41;
  std::optional<double> l_window;
  limit_cmd->add_option("--hurst", l_hurst, "Hurst parameter")->required();
  limit_cmd->add_option("--gamma", l_gamma, "Scale gamma");
  limit_cmd->add_option("--reps", l_reps, "Replications");
  limit_cmd->add_option("--grid-size", l_grid, "Odd grid size");
  limit_cmd->add_option("--window", l_window, "Half-width M; chosen automatically when absent");
  limit_cmd->add_option("--bins", l_bins, "Histogram bins");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one data set from the config model");
  std::string sim_file = "data.csv";
  sim_cmd->add_option("--file", sim_file, "File name inside the output directory");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "MLE and Bayesian estimate from a data CSV");
  std::string e_data, e_prior;
  std::optional<double> e_coarse, e_prior_mean, e_prior_sd;
  est_cmd->add_option("--data", e_data, "Data CSV written by simulate")->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--prior", e_prior, "uniform or truncated_gaussian");
  est_cmd->add_option("--prior-mean", e_prior_mean, "Truncated Gaussian prior mean");
  est_cmd->add_option("--prior-sd", e_prior_sd, "Truncated Gaussian prior sd");
  est_cmd->add_option("--coarse-step", e_coarse, "Override the coarse grid spacing");

  auto* rates_cmd = app.add_subcommand("rates", "Rate-of-convergence experiment over the asymptotic grid");
  auto* cmp_cmd = app.add_subcommand("compare", "Normalized errors against limit-process draws");
  bool c_unit = false;
  cmp_cmd->add_flag("--unit-scaled", c_unit, "Compare gamma^(1/H)-scaled errors with draws at gamma = 1");
  auto* report_cmd = app.add_subcommand("report", "Run all experiments and write CSV tables and SVG figures");
  bool r_gallery_only = false;
  report_cmd->add_flag("--gallery-only", r_gallery_only, "Only write the signal-shape gallery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (g.verbose) spdlog::set_level(spdlog::level::info);

  try {
    const std::size_t workers = resolve_workers(g.workers);
    if (gamma_cmd->parsed()) {
      ExperimentConfig c = load(g);
      CuspModelSpec spec = c.model;
      if (!g_variant.empty()) spec.variant = parse_variant(g_variant);
      if (g_kappa) spec.kappa = *g_kappa;
      if (g_a) spec.a = *g_a;
      if (g_param) spec = spec.with_asymptotic_parameter(*g_param);
      spec.validate();
      const double p = spec.asymptotic_parameter();
      const ModelConstants mc = model_constants(spec, p);
      CsvTable t({"variant", "kappa", "hurst", "gamma_star", "gamma", "rate_exponent", "asymptotic_parameter", "phi"});
      t.add_row({to_string(spec.variant), spec.kappa, mc.hurst, mc.gamma_star, mc.gamma, mc.rate_exponent, p, mc.phi});
      emit_row(g, t, "gamma.csv");
    } else if (fbm_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      const FbmGrid grid = FbmGrid::symmetric(f_half, f_points);
      const Hurst H(f_hurst);
      Eigen::MatrixXd paths;
      if (f_method == "exact") {
        paths = ExactFbmSampler(H, grid).sample_batch(StreamSeed(c.seed), 0, f_draws);
      } else {
        paths = MovingAverageFbmSampler(H, grid, default_ma_truncation(grid), default_ma_inner_step(grid))
                    .sample_batch(StreamSeed(c.seed), 0, f_draws);
      }
      std::vector<std::string> header{"u"};
      for (std::size_t j = 0; j < f_draws; ++j) header.push_back("path_" + std::to_string(j));
      CsvTable t(header);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<CsvField> row{grid.points[i]};
        for (std::size_t j = 0; j < f_draws; ++j) row.emplace_back(paths(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        t.add_row(std::move(row));
      }
      const fs::path file = out_dir(c) / "fbm.csv";
      t.write(file);
      report_files({file});
    } else if (limit_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      const LimitSample s = limit_sample(Hurst(l_hurst), l_gamma, l_window, l_grid, l_reps, StreamSeed(c.seed), workers);
      const fs::path dir = out_dir(c);
      auto files = write_moment_report({limit_moments(s)}, dir);
      const auto more = write_density_report({{l_hurst, limit_density(s, l_bins), l_reps}}, dir);
      files.insert(files.end(), more.begin(), more.end());
      report_files(files);
    } else if (sim_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      const double step = experiment_step(c.model, c.estimation.resolution);
      const ObservedData data = simulate(c.model, step, StreamSeed(c.seed));
      const fs::path file = out_dir(c) / sim_file;
      data_table(data).write(file);
      report_files({file});
    } else if (est_cmd->parsed()) {
      ExperimentConfig c = load(g);
      if (!e_prior.empty()) c.estimation.prior = e_prior;
      if (e_prior_mean) c.estimation.prior_mean = *e_prior_mean;
      if (e_prior_sd) c.estimation.prior_sd = *e_prior_sd;
      EstimationOptions opt = c.estimation_options();
      opt.coarse_step = e_coarse;
      const ObservedData data = read_data(e_data, c.model);
      const EstimationResult r = estimate(c.model, data, opt);
      CsvTable t({"theta_mle", "theta_bayes", "grid_step_final", "loglik_at_mle"});
      t.add_row({r.theta_mle, r.theta_bayes, r.grid_step_final, r.loglik_at_mle});
      emit_row(g, t, "estimate.csv");
    } else if (rates_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      const RateExperiment re = run_rate_experiment(c, workers);
      report_files(write_rate_report(re, out_dir(c)));
      std::printf("slope %.6f +- %.6f (theory %.6f)\n", re.fit.slope, re.fit.slope_stderr, re.fit.theoretical_exponent);
      if (!slope_check(c, re.fit)) {
        spdlog::error("slope check failed");
        return kExitCheck;
      }
    } else if (cmp_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      const ComparisonReport rep = run_limit_comparison(c, workers, c_unit);
      report_files(write_comparison_report(rep, out_dir(c)));
      std::printf("ks_mle %.6f ks_bayes %.6f threshold %.6f %s\n", rep.ks_mle, rep.ks_bayes, rep.threshold,
                  rep.passed ? "pass" : "fail");
      if (!rep.passed) return kExitCheck;
    } else if (report_cmd->parsed()) {
      const ExperimentConfig c = load(g);
      ReportResults res;
      if (!r_gallery_only) res = compute_report(c, workers);
      report_files(emit_report(res, out_dir(c)));
    }
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    spdlog::error("I/O error: {}", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitNumerical;
  }
  return 0;
}
