#include "cusploc/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cusploc/constants.hpp"
#include "cusploc/models.hpp"
#include "cusploc/parallel.hpp"

namespace cusploc::harness {

LinearFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("slope fit needs at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("slope fit needs positive finite points");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  std::vector<double> sorted = lx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("slope fit needs distinct x values");
  return ols(lx, ly);
}

double experiment_step(const CuspModelSpec& spec, double resolution) {
  if (!spec.trajectory_data()) return 0.0;
  const double T = spec.horizon;
  double target = spec.effective_step();
  if (spec.step <= 0 && spec.small_noise() && spec.epsilon > 0)
    target = std::min(target, effective_scale(spec, spec.epsilon) / resolution);
  const double n = std::ceil(T / target * (1 - 1e-12));
  if (n > kMaxEulerSteps) {
    std::ostringstream msg;
    msg << "resolving the fluctuation scale needs " << n << " Euler steps on [0, " << T << "], more than the limit of "
        << kMaxEulerSteps;
    throw NumericalError(msg.str());
  }
  return T / n;
}

ReplicationRecord run_replication(const ExperimentConfig& config, std::uint32_t g, std::uint32_t r) {
  const StreamSeed seed(config.seed, g, r);
  try {
    const double p = config.grid.at(g);
    const CuspModelSpec spec = config.model.with_asymptotic_parameter(p);
    const double step = experiment_step(spec, config.estimation.resolution);
    const ObservedData data = simulate(spec, step, seed);
    const EstimationResult est = estimate(spec, data, config.estimation_options(), spec.theta0);
    ReplicationRecord rec;
    rec.g = g;
    rec.r = r;
    rec.parameter = p;
    rec.theta_mle = est.theta_mle;
    rec.theta_bayes = est.theta_bayes;
    rec.normalized_mle = est.normalized_errors->first;
    rec.normalized_bayes = est.normalized_errors->second;
    return rec;
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "replication failed at seed (master " << seed.master << ", g " << seed.g << ", r " << seed.r
        << "): " << e.what();
    throw ReplicationError(msg.str(), seed);
  }
}

RatePoint summarize(const CuspModelSpec& spec, double step, const std::vector<ReplicationRecord>& records) {
  if (records.empty()) throw DomainError("no replications to summarize");
  RatePoint pt;
  pt.parameter = records.front().parameter;
  pt.phi = normalizing_rate(spec, pt.parameter);
  pt.scale = effective_scale(spec, pt.parameter);
  pt.step = step;
  pt.replications = records.size();
  std::vector<double> sq_m, sq_b, d_m, d_b, diff;
  for (const auto& rec : records) {
    const double em = rec.theta_mle - spec.theta0, eb = rec.theta_bayes - spec.theta0;
    d_m.push_back(em);
    d_b.push_back(eb);
    sq_m.push_back(em * em);
    sq_b.push_back(eb * eb);
    diff.push_back(eb * eb - em * em);
  }
  const MeanEstimate mm = mean_estimate(sq_m), mb = mean_estimate(sq_b), md = mean_estimate(diff);
  pt.mse_mle = mm.mean;
  pt.mse_bayes = mb.mean;
  pt.se_mse_mle = mm.stderr_;
  pt.se_mse_bayes = mb.stderr_;
  pt.rmse_mle = std::sqrt(mm.mean);
  pt.rmse_bayes = std::sqrt(mb.mean);
  pt.bias_mle = mean_estimate(d_m).mean;
  pt.bias_bayes = mean_estimate(d_b).mean;
  pt.mse_diff = md.mean;
  pt.se_mse_diff = md.stderr_;
  return pt;
}

namespace {

void check_interior(const ExperimentConfig& config) {
  double widest = 0.0;
  for (double p : config.grid) widest = std::max(widest, effective_scale(config.model.with_asymptotic_parameter(p), p));
  const auto& m = config.model;
  if (m.theta0 - m.alpha < 10 * widest || m.beta - m.theta0 < 10 * widest) {
    std::ostringstream msg;
    msg << "theta0 must be at least 10 fluctuation scales (" << 10 * widest << ") from alpha and beta";
    throw ConfigError(msg.str());
  }
}

std::vector<ReplicationRecord> run_grid_points(const ExperimentConfig& config, const std::vector<std::uint32_t>& gs,
                                               std::size_t workers) {
  const std::size_t R = config.replications;
  std::vector<ReplicationRecord> records(gs.size() * R);
  parallel_for(records.size(), resolve_workers(workers), [&](std::size_t i) {
    records[i] = run_replication(config, gs[i / R], static_cast<std::uint32_t>(i % R));
  });
  return records;
}

}  // namespace

RateExperiment run_rate_experiment(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  check_interior(config);
  std::vector<std::uint32_t> gs(config.grid.size());
  for (std::size_t g = 0; g < gs.size(); ++g) gs[g] = static_cast<std::uint32_t>(g);
  RateExperiment out;
  out.records = run_grid_points(config, gs, workers);

  const std::size_t R = config.replications;
  std::vector<std::pair<double, double>> pm, pb;
  for (std::size_t g = 0; g < gs.size(); ++g) {
    const CuspModelSpec spec = config.model.with_asymptotic_parameter(config.grid[g]);
    std::vector<ReplicationRecord> slice(out.records.begin() + g * R, out.records.begin() + (g + 1) * R);
    out.fit.table.push_back(summarize(spec, experiment_step(spec, config.estimation.resolution), slice));
    pm.emplace_back(config.grid[g], out.fit.table.back().rmse_mle);
    pb.emplace_back(config.grid[g], out.fit.table.back().rmse_bayes);
  }
  out.fit.theoretical_exponent = rate_exponent(config.model);
  if (config.grid.size() >= 3) {
    const LinearFit f = fit_loglog_slope(pm);
    out.fit.slope = f.slope;
    out.fit.intercept = f.intercept;
    out.fit.slope_stderr = f.slope_stderr;
    out.fit.bayes_fit = fit_loglog_slope(pb);
  } else {
    spdlog::warn("grid has fewer than 3 points; no slope fit");
    out.fit.slope = out.fit.intercept = out.fit.slope_stderr = std::nan("");
  }

  // Order the table in the asymptotic direction (decreasing phi) for the monotonicity check.
  std::vector<std::size_t> order(gs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.fit.table[a].phi > out.fit.table[b].phi; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const RatePoint& prev = out.fit.table[order[k - 1]];
    const RatePoint& cur = out.fit.table[order[k]];
    const double se_prev = prev.se_mse_mle / (2 * prev.rmse_mle), se_cur = cur.se_mse_mle / (2 * cur.rmse_mle);
    if (cur.rmse_mle > prev.rmse_mle + 2 * std::hypot(se_prev, se_cur)) out.fit.monotone = false;
  }
  return out;
}

bool slope_check(const ExperimentConfig& config, const RateFitResult& fit) {
  if (!config.thresholds.slope_tolerance) return true;
  const double target = config.thresholds.slope_target.value_or(fit.theoretical_exponent);
  return std::abs(fit.slope - target) <= *config.thresholds.slope_tolerance;
}

std::size_t finest_grid_index(const ExperimentConfig& config) {
  std::size_t best = 0;
  for (std::size_t g = 1; g < config.grid.size(); ++g)
    if (normalizing_rate(config.model, config.grid[g]) < normalizing_rate(config.model, config.grid[best])) best = g;
  return best;
}

ComparisonReport run_limit_comparison(const ExperimentConfig& config, std::size_t workers, bool unit_scaled) {
  config.validate();
  if (!config.comparison) throw ConfigError("limit comparison needs a comparison section");
  if (config.model.regime != Regime::Cusp) throw ConfigError("limit comparison applies to the cusp regime only");
  check_interior(config);
  const ComparisonSettings& cs = *config.comparison;
  const auto g = static_cast<std::uint32_t>(finest_grid_index(config));
  const CuspModelSpec spec = config.model.with_asymptotic_parameter(config.grid[g]);

  ComparisonReport rep;
  rep.parameter = config.grid[g];
  rep.hurst = spec.hurst();
  rep.gamma = gamma_for_model(spec);
  rep.phi = normalizing_rate(spec, rep.parameter);
  rep.threshold = cs.ks_threshold;
  rep.unit_scaled = unit_scaled;

  const auto records = run_grid_points(config, {g}, workers);
  rep.point = summarize(spec, experiment_step(spec, config.estimation.resolution), records);
  const double factor = unit_scaled ? std::pow(rep.gamma, 1.0 / rep.hurst) : 1.0;
  for (const auto& r : records) {
    rep.errors_mle.push_back(r.normalized_mle * factor);
    rep.errors_bayes.push_back(r.normalized_bayes * factor);
  }

  const double gamma = unit_scaled ? 1.0 : rep.gamma;
  std::optional<double> window = cs.window;
  if (window && unit_scaled) *window *= factor;
  rep.limit = limit_sample(Hurst(rep.hurst), gamma, window, cs.grid_size, cs.limit_replications,
                           StreamSeed(config.seed, kLimitStream, 0), resolve_workers(workers));
  rep.ks_mle = ks_distance(rep.errors_mle, rep.limit.xi_hat);
  rep.ks_bayes = ks_distance(rep.errors_bayes, rep.limit.xi_tilde);
  rep.passed = rep.ks_mle < cs.ks_threshold && rep.ks_bayes < cs.ks_threshold;
  return rep;
}

std::pair<double, double> limit_self_comparison(Hurst H, double gamma, const ComparisonSettings& settings,
                                                std::uint64_t master, std::size_t workers) {
  workers = resolve_workers(workers);
  const LimitSample a = limit_sample(H, gamma, settings.window, settings.grid_size, settings.limit_replications,
                                     StreamSeed(master, kLimitStream, 0), workers);
  const LimitSample b = limit_sample(H, gamma, a.window, settings.grid_size, settings.limit_replications,
                                     StreamSeed(master, kLimitStream - 1, 0), workers);
  return {ks_distance(a.xi_hat, b.xi_hat), ks_distance(a.xi_tilde, b.xi_tilde)};
}

}  // namespace cusploc::harness
