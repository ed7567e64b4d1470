#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cusploc/fbm.hpp"
#include "cusploc/stats.hpp"

namespace cusploc {

// One realization of Z(u) = exp(gamma W^H(u) - gamma^2 |u|^{2H} / 2) on a grid.
struct LimitDraw {
  FbmPath fbm;
  std::vector<double> log_z;
  std::vector<double> z_values;
  double xi_hat = 0.0;
  double xi_tilde = 0.0;

  // Draw built from given positive z values (fbm values left empty).
  static LimitDraw from_z(FbmGrid grid, std::vector<double> z);
};

LimitDraw limit_z_path(Hurst H, double gamma, const FbmGrid& grid, const StreamSeed& seed);

// Grid point of the maximum; ties go to the smallest |u|, then the leftmost point.
double argmax_xi(const LimitDraw& draw);
std::size_t argmax_index(std::span<const double> u, std::span<const double> log_z);

// Trapezoid ratio of the integrals of u Z(u) and Z(u), computed from log z.
double bayes_xi(const LimitDraw& draw);
double bayes_xi(std::span<const double> u, std::span<const double> log_z);

struct LimitStats {
  double xi_hat = 0.0;
  double xi_tilde = 0.0;
  bool boundary = false;
};

// Draws xi_hat and xi_tilde for replications of the limit process on a fixed grid.
class LimitSampler {
 public:
  LimitSampler(Hurst H, double gamma, FbmGrid grid);

  const FbmGrid& grid() const { return fbm_.grid(); }

  // Replication r uses fBm stream (seed.master, seed.g, seed.r + r). Work is split into
  // fixed batches so results do not depend on the worker count.
  std::vector<LimitStats> run(const StreamSeed& seed, std::size_t replications, std::size_t workers,
                              Purpose purpose = Purpose::Fbm) const;

 private:
  ExactFbmSampler fbm_;
  double gamma_;
  std::vector<double> drift_;
};

inline constexpr std::size_t kDefaultLimitGridSize = 1025;
inline constexpr double kMaxBoundaryFraction = 1e-3;

// Doubles M from 20 gamma^(-1/H) until fewer than 0.1% of 4000 pilot draws peak in the outer quarter |u| > 3M/4.
double auto_window(Hurst H, double gamma, std::size_t grid_size, const StreamSeed& seed, std::size_t workers = 1);

struct LimitSample {
  double hurst = 0.0;
  double gamma = 0.0;
  double window = 0.0;
  std::size_t grid_size = 0;
  double grid_step = 0.0;
  std::vector<double> xi_hat;
  std::vector<double> xi_tilde;
  std::size_t boundary_hits = 0;
};

// Throws WindowTooSmallError when more than 0.1% of draws peak at the window boundary.
LimitSample limit_sample(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                         std::size_t replications, const StreamSeed& seed, std::size_t workers = 1);

struct LimitMoments {
  double hurst = 0.0;
  double gamma = 0.0;
  double e_xi_hat_sq = 0.0;
  double e_xi_tilde_sq = 0.0;
  double stderr_hat = 0.0;
  double stderr_tilde = 0.0;
  // Paired difference E xi_hat^2 - E xi_tilde^2 and its standard error.
  double diff = 0.0;
  double stderr_diff = 0.0;
  std::size_t replications = 0;
  double window = 0.0;
  std::size_t boundary_hits = 0;
};

LimitMoments limit_moments(const LimitSample& sample);
LimitMoments limit_moments(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                           std::size_t replications, const StreamSeed& seed, std::size_t workers = 1);

struct LimitDensity {
  Histogram xi_hat;
  Histogram xi_tilde;
  double window = 0.0;
};

// Bins are whole multiples of the grid step with edges halfway between grid points,
// symmetric about 0 and covering the window.
std::vector<double> limit_bin_edges(const LimitSample& sample, std::size_t bins);
LimitDensity limit_density(const LimitSample& sample, std::size_t bins);
LimitDensity limit_density(Hurst H, double gamma, std::optional<double> window, std::size_t grid_size,
                           std::size_t replications, const StreamSeed& seed, std::size_t bins,
                           std::size_t workers = 1);

// Density of the argmax of W(u) - |u|/2 over the real line (two-sided Brownian motion).
double mle_density_analytic_h_half(double x);

}  // namespace cusploc
