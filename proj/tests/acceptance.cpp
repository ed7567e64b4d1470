#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <sys/wait.h>

#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"
#include "cusploc/fbm.hpp"
#include "cusploc/harness/config.hpp"
#include "cusploc/harness/experiment.hpp"
#include "cusploc/limit.hpp"
#include "cusploc/models.hpp"
#include "cusploc/parallel.hpp"
#include "cusploc/stats.hpp"
#include "oracles.hpp"

using namespace cusploc;
using namespace cusploc::harness;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1729;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t workers() { return resolve_workers(0); }

// ---------------------------------------------------------------- 1

Outcome constants_check() {
  std::ostringstream d;
  bool ok = std::abs(gamma_star_sq(CuspExponent(0.0)) - 4.0) <= 1e-8;
  d << "gamma_star_sq(0)=" << fmt::format("{:.12f}", gamma_star_sq(CuspExponent(0.0)));
  for (double k : {-0.25, 0.1, 0.25, 0.4}) {
    const double lib = gamma_star_sq(CuspExponent(k));
    const double ora = oracle::gamma_star_sq(k);
    const double diff = std::abs(lib - ora);
    ok = ok && diff <= 1e-8;
    d << fmt::format("; k={} diff={:.2e}", k, diff);
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 2

Outcome fbm_check() {
  constexpr std::size_t kDraws = 20000, kMaDraws = 10000;
  const FbmGrid grid = FbmGrid::symmetric(2.0, 33);
  bool ok = true;
  std::ostringstream d;
  for (double h : {0.3, 0.5, 0.75}) {
    const Hurst H(h);
    const Eigen::MatrixXd x = ExactFbmSampler(H, grid).sample_batch(StreamSeed(kSeed, 2, 0), 0, kDraws);
    const Eigen::MatrixXd y =
        MovingAverageFbmSampler(H, grid, default_ma_truncation(grid), default_ma_inner_step(grid))
            .sample_batch(StreamSeed(kSeed, 2, 1u << 20), 0, kMaDraws);
    const auto n = static_cast<Eigen::Index>(grid.size());
    const Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(kDraws - 1);
    double worst_z = 0.0, worst_ks = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double ui = grid.points[static_cast<std::size_t>(i)], uj = grid.points[static_cast<std::size_t>(j)];
        const double sij = fbm_covariance(H, ui, uj);
        const double se = std::sqrt((fbm_covariance(H, ui, ui) * fbm_covariance(H, uj, uj) + sij * sij) / kDraws);
        if (se == 0.0) {
          if (std::abs(cov(i, j)) > 1e-12) ok = false;
          continue;
        }
        worst_z = std::max(worst_z, std::abs(cov(i, j) - sij) / se);
      }
      if (static_cast<std::size_t>(i) == grid.zero_index) continue;
      std::vector<double> a(x.row(i).begin(), x.row(i).end()), b(y.row(i).begin(), y.row(i).end());
      worst_ks = std::max(worst_ks, ks_distance(std::move(a), std::move(b)));
    }
    ok = ok && worst_z <= 4.0 && worst_ks < 0.03;
    d << fmt::format("H={} max|z|={:.2f} maxKS={:.4f}; ", h, worst_z, worst_ks);
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 3

Outcome martingale_check() {
  constexpr std::uint32_t kDraws = 20000;
  const FbmGrid grid = FbmGrid::symmetric(4.0, 33);
  const std::array<double, 4> us{-2.0, -1.0, 1.0, 2.0};
  bool ok = true;
  std::ostringstream d;
  for (double h : {0.5, 0.75}) {
    std::array<std::vector<double>, 4> z;
    for (auto& v : z) v.resize(kDraws);
    parallel_for(kDraws, workers(), [&](std::size_t r) {
      const LimitDraw draw = limit_z_path(Hurst(h), 1.0, grid, StreamSeed(kSeed, 3, static_cast<std::uint32_t>(r)));
      for (std::size_t k = 0; k < us.size(); ++k) {
        const auto it = std::find_if(grid.points.begin(), grid.points.end(),
                                     [&](double u) { return std::abs(u - us[k]) < 1e-12; });
        z[k][r] = draw.z_values[static_cast<std::size_t>(it - grid.points.begin())];
      }
    });
    for (std::size_t k = 0; k < us.size(); ++k) {
      const MeanEstimate m = mean_estimate(z[k]);
      const double zs = std::abs(m.mean - 1.0) / m.stderr_;
      ok = ok && zs <= 4.0;
      d << fmt::format("H={} u={} mean={:.4f} z={:.2f}; ", h, us[k], m.mean, zs);
    }
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 4

Outcome ordering_check() {
  bool ok = true;
  std::ostringstream d;
  std::uint32_t g = 40;
  for (double h : {0.5, 0.6, 0.7, 0.8}) {
    const LimitMoments m =
        limit_moments(Hurst(h), 1.0, std::nullopt, kDefaultLimitGridSize, 10000, StreamSeed(kSeed, g++, 0), workers());
    const double z = m.diff / m.stderr_diff;
    ok = ok && z > 4.0;
    d << fmt::format("H={} E_hat={:.4g} E_tilde={:.4g} z={:.1f}; ", h, m.e_xi_hat_sq, m.e_xi_tilde_sq, z);
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 5

Outcome analytic_density_check() {
  constexpr std::size_t kDraws = 100000;
  boost::math::quadrature::exp_sinh<double> tail;
  const double mass = 2.0 * tail.integrate([](double x) { return mle_density_analytic_h_half(x); });
  const double m2 = 2.0 * tail.integrate([](double x) { return x * x * mle_density_analytic_h_half(x); });
  double transcription = 0.0;
  for (double x = 0.0; x <= 40.0; x += 0.01)
    transcription = std::max(transcription, std::abs(mle_density_analytic_h_half(x) - oracle::argmax_density_h_half(x)));

  const LimitSample s = limit_sample(Hurst(0.5), 1.0, 80.0, 1025, kDraws, StreamSeed(kSeed, 5, 0), workers());
  const Histogram hist = histogram(s.xi_hat, limit_bin_edges(s, 41));

  // Bin probabilities; sparse tail bins are pooled inward until the expected count reaches 5.
  std::vector<std::pair<double, std::size_t>> bins;
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    const double p = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double x) { return mle_density_analytic_h_half(x); }, hist.edges[b], hist.edges[b + 1], 10, 1e-12);
    bins.emplace_back(p, hist.counts[b]);
  }
  auto pool = [&](bool from_left) {
    while (bins.size() > 2) {
      auto& end = from_left ? bins.front() : bins.back();
      if (end.first * kDraws >= 5.0) break;
      auto& next = from_left ? bins[1] : bins[bins.size() - 2];
      next.first += end.first;
      next.second += end.second;
      if (from_left)
        bins.erase(bins.begin());
      else
        bins.pop_back();
    }
  };
  pool(true);
  pool(false);
  double worst = 0.0;
  for (const auto& [p, c] : bins) {
    const double se = std::sqrt(p * (1 - p) / kDraws);
    worst = std::max(worst, std::abs(static_cast<double>(c) / kDraws - p) / se);
  }

  std::vector<double> sq(s.xi_hat.size());
  std::transform(s.xi_hat.begin(), s.xi_hat.end(), sq.begin(), [](double x) { return x * x; });
  const MeanEstimate mc = mean_estimate(sq);
  const double z2 = std::abs(mc.mean - m2) / mc.stderr_;

  const bool ok = std::abs(mass - 1.0) <= 1e-6 && worst <= 4.0 && z2 <= 4.0 && transcription < 1e-12;
  return {ok, fmt::format("mass-1={:.2e} oracle_diff={:.1e} bins={} max|z|={:.2f} m2={:.4f} mc={:.4f}+-{:.4f} z={:.2f}",
                          mass - 1.0, transcription, bins.size(), worst, m2, mc.mean, mc.stderr_, z2)};
}

// ---------------------------------------------------------------- 6, 7, 9

ExperimentConfig gaussian_config(double kappa) {
  ExperimentConfig c;
  c.model.kappa = kappa;
  c.model.theta0 = 0.5;
  c.model.alpha = 0.1;
  c.model.beta = 0.9;
  c.grid = {0.1, 0.05, 0.025, 0.0125};
  c.replications = 400;
  c.seed = kSeed;
  return c;
}

Outcome slope_outcome(const ExperimentConfig& c, double target, double tol) {
  const RateExperiment re = run_rate_experiment(c, workers());
  std::ostringstream d;
  d << fmt::format("slope={:.4f}+-{:.4f} target={:.4f}+-{} rmse=", re.fit.slope, re.fit.slope_stderr, target, tol);
  for (const auto& p : re.fit.table) d << fmt::format("{:.3e} ", p.rmse_mle);
  return {std::abs(re.fit.slope - target) <= tol, d.str()};
}

Outcome rate_check(const std::string& part) {
  if (part == "6a") return slope_outcome(gaussian_config(0.0), 2.0, 0.2);
  if (part == "6b") return slope_outcome(gaussian_config(0.25), 4.0 / 3.0, 0.15);
  if (part == "6c") return slope_outcome(gaussian_config(-0.25), 4.0, 0.2);
  ExperimentConfig c = gaussian_config(0.75);
  c.model.regime = Regime::Smooth;
  c.model.a = 10.0;
  return slope_outcome(c, 1.0, 0.15);
}

Outcome poisson_check() {
  ExperimentConfig c;
  c.model.variant = Variant::PoissonPeriodic;
  c.model.kappa = 0.25;
  c.model.a = 2.0;
  c.model.h = Nuisance::constant(2.0);
  c.model.theta0 = 0.5;
  c.model.alpha = 0.15;
  c.model.beta = 0.85;
  c.model.tau = 1.0;
  c.grid = {64, 256, 1024};
  c.replications = 400;
  c.seed = kSeed;
  return slope_outcome(c, -2.0 / 3.0, 0.15);
}

Outcome efficiency_check() {
  bool ok = true;
  std::ostringstream d;
  for (double kappa : {0.25, 0.0}) {
    ExperimentConfig c = gaussian_config(kappa);
    c.grid = {0.0125};
    const RateExperiment re = run_rate_experiment(c, workers());
    const RatePoint& p = re.fit.table.front();
    const double pooled = std::sqrt(p.se_mse_mle * p.se_mse_mle + p.se_mse_bayes * p.se_mse_bayes);
    const bool pass = p.mse_bayes <= p.mse_mle + 2 * pooled;
    ok = ok && pass;
    d << fmt::format("k={} mse_mle={:.3e} mse_be={:.3e} pooled_se={:.2e} paired_se={:.2e}; ", kappa, p.mse_mle,
                     p.mse_bayes, pooled, p.se_mse_diff);
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 8

Outcome distribution_check() {
  ExperimentConfig c = gaussian_config(0.25);
  c.grid = {0.0125};
  c.replications = 1000;
  c.comparison = ComparisonSettings{};
  c.comparison->limit_replications = 10000;
  c.comparison->ks_threshold = 0.08;
  const ComparisonReport r = run_limit_comparison(c, workers());
  return {r.ks_mle < 0.08 && r.ks_bayes < 0.08,
          fmt::format("KS(MLE, xi_hat)={:.4f} KS(BE, xi_tilde)={:.4f} window={:.1f}", r.ks_mle, r.ks_bayes,
                      r.limit.window)};
}

// ---------------------------------------------------------------- 10

Outcome noise_check() {
  constexpr std::uint32_t kReps = 100;
  CuspModelSpec s;
  s.kappa = 0.25;
  s.epsilon = 0.1;
  std::vector<double> rel(kReps);
  parallel_for(kReps, workers(), [&](std::size_t r) {
    const Trajectory tr = simulate_gaussian_signal(s, 1e-4, StreamSeed(kSeed, 10, static_cast<std::uint32_t>(r)));
    rel[r] = estimate_noise_level(tr) / s.epsilon - 1.0;
  });
  double ss = 0.0, worst = 0.0;
  for (double e : rel) {
    ss += e * e;
    worst = std::max(worst, std::abs(e));
  }
  const double rms = std::sqrt(ss / kReps);
  return {rms < 0.02, fmt::format("rms relative error={:.4f} max={:.4f}", rms, worst)};
}

// ---------------------------------------------------------------- 11

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CUSPLOC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = s.str();
  }
  return out;
}

Outcome determinism_check() {
  const fs::path root = fs::temp_directory_path() / "cusploc_acceptance_11";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"version":1,"model":{"variant":"gaussian_signal","kappa":0.25},)"
                     << R"("grid":[0.1,0.05,0.025],"replications":50,"seed":1729,)"
                     << R"("comparison":{"limit_replications":500,"grid_size":257},)"
                     << R"("report":{"moment_hurst":[0.5,0.7],"density_hurst":[0.5],"limit_replications":300,)"
                     << R"("grid_size":257,"bins":21}})";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"gamma", "gamma --kappa 0.1"},
      {"fbm", "fbm --hurst 0.7 --points 17 --draws 64"},
      {"fbm_ma", "fbm --hurst 0.3 --points 9 --draws 32 --method ma"},
      {"limit", "limit --hurst 0.6 --reps 400 --grid-size 257"},
      {"simulate", "simulate"},
      {"rates", "rates"},
      {"compare", "compare"},
      {"report", "report"},
  };
  std::size_t files = 0;
  std::ostringstream bad;
  for (const auto& [name, args] : commands) {
    std::map<std::string, std::string> runs[3];
    const std::size_t worker_counts[3] = {1, 3, 1};
    for (int k = 0; k < 3; ++k) {
      const fs::path out = root / fmt::format("{}_{}", name, k);
      const int code = run_cli(fmt::format("--config {} --workers {} --out {} {}", cfg.string(), worker_counts[k],
                                           out.string(), args));
      if (code != 0 && code != 4) bad << name << " exit " << code << "; ";
      if (fs::exists(out)) runs[k] = csv_files(out);
      if (name == "simulate" && fs::exists(out / "data.csv")) {
        const fs::path est = root / fmt::format("estimate_{}", k);
        run_cli(fmt::format("--config {} --workers {} --out {} estimate --data {}", cfg.string(), worker_counts[k],
                            est.string(), (out / "data.csv").string()));
        for (auto& [f, text] : csv_files(est)) runs[k]["estimate/" + f] = text;
      }
    }
    if (runs[0].empty()) bad << name << " wrote no CSV; ";
    if (runs[0] != runs[1] || runs[0] != runs[2]) bad << name << " differs; ";
    files += runs[0].size();
  }
  fs::remove_all(root);
  const std::string problems = bad.str();
  return {problems.empty(),
          problems.empty() ? fmt::format("{} CSV files identical across 3 runs (workers 1, 3, 1)", files) : problems};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> criteria{
      {"1", constants_check},
      {"2", fbm_check},
      {"3", martingale_check},
      {"4", ordering_check},
      {"5", analytic_density_check},
      {"6a", [] { return rate_check("6a"); }},
      {"6b", [] { return rate_check("6b"); }},
      {"6c", [] { return rate_check("6c"); }},
      {"6d", [] { return rate_check("6d"); }},
      {"7", poisson_check},
      {"8", distribution_check},
      {"9", efficiency_check},
      {"10", noise_check},
      {"11", determinism_check},
  };
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) ids.emplace_back(argv[i]);
  if (ids.empty() || (ids.size() == 1 && ids[0] == "all"))
    ids = {"1", "2", "3", "4", "5", "6a", "6b", "6c", "6d", "7", "8", "9", "10", "11"};
  bool all = true;
  for (const auto& id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %s: %s: %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
