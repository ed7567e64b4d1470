#include "cusploc/harness/report.hpp"

#include <cmath>

#include "cusploc/constants.hpp"
#include "cusploc/harness/csv.hpp"
#include "cusploc/harness/svg.hpp"
#include "cusploc/model_spec.hpp"
#include "cusploc/parallel.hpp"

namespace cusploc::harness {

namespace fs = std::filesystem;

namespace {

std::vector<double> centers(const Histogram& h) {
  std::vector<double> c;
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) c.push_back(0.5 * (h.edges[b] + h.edges[b + 1]));
  return c;
}

std::vector<double> column(const std::vector<RatePoint>& t, double RatePoint::*m) {
  std::vector<double> out;
  for (const auto& p : t) out.push_back(p.*m);
  return out;
}

fs::path put(const fs::path& dir, const std::string& name, const std::string& text) {
  ensure_directory(dir);
  const fs::path p = dir / name;
  write_text(p, text);
  return p;
}

}  // namespace

ReportResults compute_report(const ExperimentConfig& config, std::size_t workers) {
  workers = resolve_workers(workers);
  ReportResults out;
  out.rates = run_rate_experiment(config, workers);
  if (config.comparison) out.comparison = run_limit_comparison(config, workers);
  const auto& rs = config.report;
  std::uint32_t stream = kLimitStream - 2;
  for (double h : rs.moment_hurst)
    out.moments.push_back(limit_moments(Hurst(h), 1.0, std::nullopt, rs.grid_size, rs.limit_replications,
                                        StreamSeed(config.seed, stream--, 0), workers));
  for (double h : rs.density_hurst) {
    DensityPanel p;
    p.hurst = h;
    p.replications = rs.limit_replications;
    p.density = limit_density(Hurst(h), 1.0, std::nullopt, rs.grid_size, rs.limit_replications,
                              StreamSeed(config.seed, stream--, 0), rs.bins, workers);
    out.densities.push_back(std::move(p));
  }
  return out;
}

std::vector<fs::path> write_rate_report(const RateExperiment& rates, const fs::path& dir) {
  std::vector<fs::path> files;
  const auto& fit = rates.fit;
  CsvTable table({"parameter", "phi", "scale", "step", "replications", "rmse_mle", "rmse_bayes", "mse_mle",
                  "mse_bayes", "se_mse_mle", "se_mse_bayes", "bias_mle", "bias_bayes", "mse_diff", "se_mse_diff"});
  for (const auto& p : fit.table)
    table.add_row({p.parameter, p.phi, p.scale, p.step, static_cast<unsigned long long>(p.replications), p.rmse_mle,
                   p.rmse_bayes, p.mse_mle, p.mse_bayes, p.se_mse_mle, p.se_mse_bayes, p.bias_mle, p.bias_bayes,
                   p.mse_diff, p.se_mse_diff});
  files.push_back(put(dir, "rates.csv", table.str()));

  CsvTable fitcsv({"estimator", "slope", "intercept", "slope_stderr", "theoretical_exponent", "monotone"});
  fitcsv.add_row({std::string("mle"), fit.slope, fit.intercept, fit.slope_stderr, fit.theoretical_exponent,
                  std::string(fit.monotone ? "true" : "false")});
  fitcsv.add_row({std::string("bayes"), fit.bayes_fit.slope, fit.bayes_fit.intercept, fit.bayes_fit.slope_stderr,
                  fit.theoretical_exponent, std::string(fit.monotone ? "true" : "false")});
  files.push_back(put(dir, "rates_fit.csv", fitcsv.str()));

  CsvTable reps({"g", "r", "parameter", "theta_mle", "theta_bayes", "normalized_mle", "normalized_bayes"});
  for (const auto& r : rates.records)
    reps.add_row({static_cast<unsigned long long>(r.g), static_cast<unsigned long long>(r.r), r.parameter,
                  r.theta_mle, r.theta_bayes, r.normalized_mle, r.normalized_bayes});
  files.push_back(put(dir, "rates_replications.csv", reps.str()));

  if (!fit.table.empty()) {
    Plot p;
    p.title = "RMSE against the asymptotic parameter";
    p.x_label = "asymptotic parameter";
    p.y_label = "RMSE";
    p.log_x = p.log_y = true;
    const auto x = column(fit.table, &RatePoint::parameter);
    p.series.push_back({"MLE", x, column(fit.table, &RatePoint::rmse_mle), SeriesStyle::Points, {}, "", false});
    p.series.push_back({"BE", x, column(fit.table, &RatePoint::rmse_bayes), SeriesStyle::Points, {}, "", false});
    if (std::isfinite(fit.slope)) {
      std::vector<double> yf, yt;
      const double x0 = x.front(), y0 = fit.table.front().rmse_mle;
      for (double v : x) {
        yf.push_back(std::exp(fit.intercept + fit.slope * std::log(v)));
        yt.push_back(y0 * std::pow(v / x0, fit.theoretical_exponent));
      }
      char label[64];
      std::snprintf(label, sizeof label, "fit slope %.3f", fit.slope);
      p.series.push_back({label, x, yf, SeriesStyle::Line, {}, "", false});
      std::snprintf(label, sizeof label, "theory slope %.3f", fit.theoretical_exponent);
      p.series.push_back({label, x, yt, SeriesStyle::Line, {}, "#777777", true});
    }
    files.push_back(put(dir, "rates.svg", render_svg(p)));
  }
  return files;
}

std::vector<fs::path> write_comparison_report(const ComparisonReport& rep, const fs::path& dir) {
  std::vector<fs::path> files;
  CsvTable summary({"parameter", "hurst", "gamma", "phi", "replications", "limit_replications", "window",
                    "boundary_hits", "ks_mle", "ks_bayes", "threshold", "passed", "unit_scaled"});
  summary.add_row({rep.parameter, rep.hurst, rep.gamma, rep.phi, static_cast<unsigned long long>(rep.errors_mle.size()),
                   static_cast<unsigned long long>(rep.limit.xi_hat.size()), rep.limit.window,
                   static_cast<unsigned long long>(rep.limit.boundary_hits), rep.ks_mle, rep.ks_bayes, rep.threshold,
                   std::string(rep.passed ? "true" : "false"), std::string(rep.unit_scaled ? "true" : "false")});
  files.push_back(put(dir, "comparison.csv", summary.str()));

  const auto edges = limit_bin_edges(rep.limit, 41);
  const Histogram hm = histogram(rep.errors_mle, edges), hb = histogram(rep.errors_bayes, edges);
  const Histogram lm = histogram(rep.limit.xi_hat, edges), lb = histogram(rep.limit.xi_tilde, edges);
  CsvTable hist({"bin_lo", "bin_hi", "model_mle", "limit_mle", "model_bayes", "limit_bayes"});
  for (std::size_t b = 0; b < hm.density.size(); ++b)
    hist.add_row({edges[b], edges[b + 1], hm.density[b], lm.density[b], hb.density[b], lb.density[b]});
  files.push_back(put(dir, "comparison_hist.csv", hist.str()));

  const auto c = centers(hm);
  Plot pm{"normalized MLE error vs limit", "u", "density", false, false, {}, {}, {}};
  pm.series.push_back({"model", c, hm.density, SeriesStyle::Steps, {}, "", false});
  pm.series.push_back({"limit", c, lm.density, SeriesStyle::Steps, {}, "", true});
  Plot pb{"normalized BE error vs limit", "u", "density", false, false, {}, {}, {}};
  pb.series.push_back({"model", c, hb.density, SeriesStyle::Steps, {}, "", false});
  pb.series.push_back({"limit", c, lb.density, SeriesStyle::Steps, {}, "", true});
  files.push_back(put(dir, "comparison.svg", render_svg({pm, pb}, 2)));
  return files;
}

std::vector<fs::path> write_moment_report(const std::vector<LimitMoments>& moments, const fs::path& dir) {
  std::vector<fs::path> files;
  CsvTable t({"hurst", "gamma", "replications", "window", "boundary_hits", "e_xi_hat_sq", "stderr_hat",
              "e_xi_tilde_sq", "stderr_tilde", "diff", "stderr_diff"});
  std::vector<double> h, lh, lt;
  for (const auto& m : moments) {
    t.add_row({m.hurst, m.gamma, static_cast<unsigned long long>(m.replications), m.window,
               static_cast<unsigned long long>(m.boundary_hits), m.e_xi_hat_sq, m.stderr_hat, m.e_xi_tilde_sq,
               m.stderr_tilde, m.diff, m.stderr_diff});
    h.push_back(m.hurst);
    lh.push_back(std::log(m.e_xi_hat_sq));
    lt.push_back(std::log(m.e_xi_tilde_sq));
  }
  files.push_back(put(dir, "limit_moments.csv", t.str()));
  if (!moments.empty()) {
    Plot p{"second moments of the limit estimators", "H", "log second moment", false, false, {}, {}, {}};
    p.series.push_back({"MLE", h, lh, SeriesStyle::Line, {}, "", false});
    p.series.push_back({"BE", h, lt, SeriesStyle::Line, {}, "", true});
    files.push_back(put(dir, "limit_moments.svg", render_svg(p)));
  }
  return files;
}

std::vector<fs::path> write_density_report(const std::vector<DensityPanel>& panels, const fs::path& dir) {
  std::vector<fs::path> files;
  CsvTable t({"hurst", "bin_lo", "bin_hi", "density_mle", "density_bayes", "analytic_mle"});
  std::vector<Plot> plots;
  for (const auto& panel : panels) {
    const Histogram& hm = panel.density.xi_hat;
    const Histogram& hb = panel.density.xi_tilde;
    const bool half = std::abs(panel.hurst - 0.5) < 1e-12;
    std::vector<double> analytic;
    for (std::size_t b = 0; b < hm.density.size(); ++b) {
      const double mid = 0.5 * (hm.edges[b] + hm.edges[b + 1]);
      analytic.push_back(half ? mle_density_analytic_h_half(mid) : std::nan(""));
      t.add_row({panel.hurst, hm.edges[b], hm.edges[b + 1], hm.density[b], hb.density[b], analytic.back()});
    }
    char title[64];
    std::snprintf(title, sizeof title, "limit densities, H = %.3g", panel.hurst);
    Plot p{title, "u", "density", false, false, {}, {}, {}};
    const auto c = centers(hm);
    p.series.push_back({"MLE", c, hm.density, SeriesStyle::Steps, {}, "", false});
    p.series.push_back({"BE", c, hb.density, SeriesStyle::Steps, {}, "", false});
    if (half) p.series.push_back({"MLE closed form", c, analytic, SeriesStyle::Line, {}, "#000000", true});
    plots.push_back(std::move(p));
  }
  files.push_back(put(dir, "limit_density.csv", t.str()));
  if (!plots.empty()) files.push_back(put(dir, "limit_density.svg", render_svg(plots, 2)));
  return files;
}

std::vector<fs::path> write_signal_gallery(const fs::path& dir) {
  constexpr double kTheta = 0.5, kDelta = 0.25;
  constexpr std::size_t kPoints = 2001;
  std::vector<std::string> header{"t"};
  for (double k : kGalleryKappas) {
    char name[32];
    std::snprintf(name, sizeof name, "kappa_%g", k);
    header.push_back(name);
  }
  CsvTable t(header);
  std::vector<double> ts;
  std::vector<std::vector<double>> ys(std::size(kGalleryKappas));
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double tt = static_cast<double>(i) / static_cast<double>(kPoints - 1);
    ts.push_back(tt);
    std::vector<CsvField> row{tt};
    for (std::size_t k = 0; k < std::size(kGalleryKappas); ++k) {
      ys[k].push_back(cusp_ramp(kGalleryKappas[k], kDelta, tt - kTheta));
      row.emplace_back(ys[k].back());
    }
    t.add_row(std::move(row));
  }
  std::vector<fs::path> files{put(dir, "signal_shapes.csv", t.str())};
  std::vector<Plot> plots;
  for (std::size_t k = 0; k < std::size(kGalleryKappas); ++k) {
    char title[48];
    std::snprintf(title, sizeof title, "kappa = %g", kGalleryKappas[k]);
    Plot p{title, "t", "S(theta, t)", false, false, std::make_pair(0.0, 1.0), std::make_pair(-0.6, 1.6), {}};
    p.series.push_back({"", ts, ys[k], SeriesStyle::Line, {}, "", false});
    plots.push_back(std::move(p));
  }
  files.push_back(put(dir, "signal_shapes.svg", render_svg(plots, 3)));
  return files;
}

std::vector<fs::path> emit_report(const ReportResults& results, const fs::path& dir) {
  ensure_directory(dir);
  std::vector<fs::path> files;
  auto add = [&](std::vector<fs::path> more) { files.insert(files.end(), more.begin(), more.end()); };
  if (results.rates) add(write_rate_report(*results.rates, dir));
  if (results.comparison) add(write_comparison_report(*results.comparison, dir));
  if (!results.moments.empty()) add(write_moment_report(results.moments, dir));
  if (!results.densities.empty()) add(write_density_report(results.densities, dir));
  if (results.signal_gallery) add(write_signal_gallery(dir));
  return files;
}

}  // namespace cusploc::harness
