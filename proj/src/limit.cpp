#include "cusploc/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "cusploc/error.hpp"
#include "cusploc/parallel.hpp"

namespace cusploc {
namespace {

constexpr std::size_t kBatch = 64;
constexpr std::size_t kPilotDraws = 4000;
constexpr int kMaxDoublings = 16;

std::vector<double> drift_terms(Hurst H, double gamma, const FbmGrid& grid) {
  std::vector<double> d(grid.size());
  const double e = 2.0 * H.value();
  for (std::size_t i = 0; i < grid.size(); ++i) d[i] = 0.5 * gamma * gamma * std::pow(std::abs(grid.points[i]), e);
  return d;
}

}  // namespace

LimitDraw LimitDraw::from_z(FbmGrid grid, std::vector<double> z) {
  if (z.size() != grid.size()) throw DomainError("z values must match the grid");
  LimitDraw d;
  d.log_z.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0)) throw DomainError("z values must be nonnegative");
    d.log_z[i] = std::log(z[i]);
  }
  d.fbm.grid = std::move(grid);
  d.z_values = std::move(z);
  d.xi_hat = argmax_xi(d);
  d.xi_tilde = bayes_xi(d);
  return d;
}

LimitDraw limit_z_path(Hurst H, double gamma, const FbmGrid& grid, const StreamSeed& seed) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
  LimitDraw d;
  d.fbm = fbm_sample_exact(H, grid, seed);
  const auto drift = drift_terms(H, gamma, grid);
  d.log_z.resize(grid.size());
  d.z_values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    d.log_z[i] = gamma * d.fbm.values[i] - drift[i];
    d.z_values[i] = std::exp(d.log_z[i]);
  }
  d.xi_hat = argmax_xi(d);
  d.xi_tilde = bayes_xi(d);
  return d;
}

std::size_t argmax_index(std::span<const double> u, std::span<const double> log_z) {
  if (log_z.empty() || u.size() != log_z.size()) throw DomainError("argmax needs matching nonempty inputs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_z.size(); ++i) {
    if (log_z[i] > log_z[best] || (log_z[i] == log_z[best] && std::abs(u[i]) < std::abs(u[best]))) best = i;
  }
  return best;
}

double argmax_xi(const LimitDraw& draw) {
  return draw.fbm.grid.points[argmax_index(draw.fbm.grid.points, draw.log_z)];
}

double bayes_xi(std::span<const double> u, std::span<const double> log_z) {
  if (log_z.empty() || u.size() != log_z.size()) throw DomainError("bayes_xi needs matching nonempty inputs");
  if (log_z.size() == 1) return u[0];
  const double top = *std::max_element(log_z.begin(), log_z.end());
  if (!std::isfinite(top)) throw NumericalError("bayes_xi: no finite likelihood value");
  double num = 0.0, den = 0.0;
  double w_prev = std::exp(log_z[0] - top);
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double w = std::exp(log_z[i] - top);
    const double h = 0.5 * (u[i] - u[i - 1]);
    den += h * (w_prev + w);
    num += h * (w_prev * u[i - 1] + w * u[i]);
    w_prev = w;
  }
  if (!(den > 0)) throw NumericalError("bayes_xi: posterior mass underflow");
  return num / den;
}

double bayes_xi(const LimitDraw& draw) { return bayes_xi(draw.fbm.grid.points, draw.log_z); }

LimitSampler::LimitSampler(Hurst H, double gamma, FbmGrid grid)
    : fbm_(H, std::move(grid)), gamma_(gamma), drift_(drift_terms(H, gamma, fbm_.grid())) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
}

std::vector<LimitStats> LimitSampler::run(const StreamSeed& seed, std::size_t replications, std::size_t workers,
                                          Purpose purpose) const {
  std::vector<LimitStats> out(replications);
  const std::size_t batches = (replications + kBatch - 1) / kBatch;
  const auto& u = fbm_.grid().points;
  const std::size_t last = u.size() - 1;
  parallel_for(batches, workers, [&](std::size_t b) {
    const std::size_t first = b * kBatch;
    const std::size_t count = std::min(kBatch, replications - first);
    const Eigen::MatrixXd w = fbm_.sample_batch(seed, first, count, purpose);
    std::vector<double> lz(u.size());
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t i = 0; i < u.size(); ++i)
        lz[i] = gamma_ * w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - drift_[i];
      const std::size_t k = argmax_index(u, lz);
      out[first + j] = {u[k], bayes_xi(u, lz), k == 0 || k == last};
    }
  });
  return out;
}

double auto_window(Hurst H, double gamma, std::size_t grid_size, const StreamSeed& seed, std::size_t workers) {
  double window = 20.0 * std::pow(gamma, -1.0 / H.value());
  for (int d = 0; d <= kMaxDoublings; ++d, window *= 2.0) {
    LimitSampler sampler(H, gamma, FbmGrid::symmetric(window, grid_size));
    const auto stats = sampler.run(seed, kPilotDraws, workers, Purpose::LimitPilot);
    // A truncated window rarely puts the argmax on the boundary itself, so the outer quarter counts.
    const double edge = 0.75 * window;
    const auto hits = std::count_if(stats.begin(), stats.end(),
                                    [&](const LimitStats& s) { return s.boundary || std::abs(s.xi_hat) > edge; });
    spdlog::debug("limit window {:.6g}: {} of {} pilot draws in the outer quarter", window, hits, kPilotDraws);
    if (static_cast<double>(hits) < kMaxBoundaryFraction * kPilotDraws) return window;
  }
  throw WindowTooSmallError("limit window auto-sizing did not converge after " + std::to_string(kMaxDoublings) +
                            " doublings");
}

LimitSample limit_sample(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                         std::size_t replications, const StreamSeed& seed, std::size_t workers) {
  if (replications < 2) throw DomainError("limit sampling needs at least two replications");
  LimitSample s;
  s.hurst = H.value();
  s.gamma = gamma;
  s.window = window ? *window : auto_window(H, gamma, grid_size, seed, workers);
  s.grid_size = grid_size;
  LimitSampler sampler(H, gamma, FbmGrid::symmetric(s.window, grid_size));
  s.grid_step = sampler.grid().step;
  const auto stats = sampler.run(seed, replications, workers);
  s.xi_hat.reserve(replications);
  s.xi_tilde.reserve(replications);
  for (const auto& st : stats) {
    s.xi_hat.push_back(st.xi_hat);
    s.xi_tilde.push_back(st.xi_tilde);
    s.boundary_hits += st.boundary ? 1 : 0;
  }
  if (static_cast<double>(s.boundary_hits) > kMaxBoundaryFraction * static_cast<double>(replications))
    throw WindowTooSmallError("limit window " + std::to_string(s.window) + " too small: " +
                              std::to_string(s.boundary_hits) + " of " + std::to_string(replications) +
                              " draws peak at the boundary");
  return s;
}

LimitMoments limit_moments(const LimitSample& s) {
  const std::size_t n = s.xi_hat.size();
  std::vector<double> hat(n), tilde(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    hat[i] = s.xi_hat[i] * s.xi_hat[i];
    tilde[i] = s.xi_tilde[i] * s.xi_tilde[i];
    diff[i] = hat[i] - tilde[i];
  }
  const auto mh = mean_estimate(hat);
  const auto mt = mean_estimate(tilde);
  const auto md = mean_estimate(diff);
  LimitMoments m;
  m.hurst = s.hurst;
  m.gamma = s.gamma;
  m.e_xi_hat_sq = mh.mean;
  m.stderr_hat = mh.stderr_;
  m.e_xi_tilde_sq = mt.mean;
  m.stderr_tilde = mt.stderr_;
  m.diff = md.mean;
  m.stderr_diff = md.stderr_;
  m.replications = n;
  m.window = s.window;
  m.boundary_hits = s.boundary_hits;
  return m;
}

LimitMoments limit_moments(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                           std::size_t replications, const StreamSeed& seed, std::size_t workers) {
  if (replications < 100) throw DomainError("limit moments need at least 100 replications");
  return limit_moments(limit_sample(H, gamma, window, grid_size, replications, seed, workers));
}

std::vector<double> limit_bin_edges(const LimitSample& s, std::size_t bins) {
  if (bins < 1) throw DomainError("need at least one bin");
  if (bins % 2 == 0) ++bins;
  std::size_t k = (s.grid_size + bins - 1) / bins;
  if (k % 2 == 0) ++k;
  const long half = static_cast<long>(bins / 2);
  std::vector<double> edges(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j)
    edges[j] = (static_cast<double>(static_cast<long>(j) - half) - 0.5) * static_cast<double>(k) * s.grid_step;
  return edges;
}

LimitDensity limit_density(const LimitSample& s, std::size_t bins) {
  const auto edges = limit_bin_edges(s, bins);
  return {histogram(s.xi_hat, edges), histogram(s.xi_tilde, edges), s.window};
}

LimitDensity limit_density(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                           std::size_t replications, const StreamSeed& seed, std::size_t bins, std::size_t workers) {
  return limit_density(limit_sample(H, gamma, window, grid_size, replications, seed, workers), bins);
}

double mle_density_analytic_h_half(double x) {
  const long double ax = std::abs(static_cast<long double>(x));
  // Beyond this the density is below the smallest double.
  if (ax > 6000.0L) return 0.0;
  const long double r = std::sqrt(ax);
  auto upper_normal = [](long double y) { return 0.5L * std::erfc(y / std::sqrt(2.0L)); };
  const long double p = 1.5L * std::exp(ax) * upper_normal(1.5L * r) - 0.5L * upper_normal(0.5L * r);
  return static_cast<double>(std::max(p, 0.0L));
}

}  // namespace cusploc
