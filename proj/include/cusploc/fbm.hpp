#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cusploc/model_spec.hpp"
#include "cusploc/rng.hpp"

namespace cusploc {

// Uniform grid containing 0.
struct FbmGrid {
  std::vector<double> points;
  double step = 0.0;
  std::size_t zero_index = 0;

  // size points spaced evenly over [-half_width, half_width]; size must be odd.
  static FbmGrid symmetric(double half_width, std::size_t size);
  // Grid with points k * step for k in [first, last], first <= 0 <= last.
  static FbmGrid uniform(double step, long first, long last);

  std::size_t size() const { return points.size(); }
  double min() const { return points.front(); }
  double max() const { return points.back(); }
  double extent() const;
};

struct FbmPath {
  FbmGrid grid;
  std::vector<double> values;
};

double fbm_covariance(Hurst H, double u1, double u2);

// Exact sampler: Cholesky factor of the covariance over the nonzero grid points.
class ExactFbmSampler {
 public:
  ExactFbmSampler(Hurst H, FbmGrid grid);

  const FbmGrid& grid() const { return grid_; }
  Hurst hurst() const { return H_; }

  // Column j is the path drawn from stream (seed.master, seed.g, seed.r + first + j).
  Eigen::MatrixXd sample_batch(const StreamSeed& seed, std::size_t first, std::size_t count,
                               Purpose purpose = Purpose::Fbm) const;
  FbmPath sample(const StreamSeed& seed) const;

 private:
  Hurst H_;
  FbmGrid grid_;
  Eigen::MatrixXd lower_;
};

// Riemann-Ito sum of the moving-average kernel, midpoint rule on cells of width inner_step
// over [-truncation, truncation].
class MovingAverageFbmSampler {
 public:
  MovingAverageFbmSampler(Hurst H, FbmGrid grid, double truncation, double inner_step);

  const FbmGrid& grid() const { return grid_; }
  std::size_t cells() const { return static_cast<std::size_t>(kernel_.cols()); }

  Eigen::MatrixXd sample_batch(const StreamSeed& seed, std::size_t first, std::size_t count) const;
  FbmPath sample(const StreamSeed& seed) const;

 private:
  FbmGrid grid_;
  Eigen::MatrixXd kernel_;
  double sqrt_cell_ = 0.0;
};

FbmPath fbm_sample_exact(Hurst H, const FbmGrid& grid, const StreamSeed& seed);
FbmPath fbm_sample_ma(Hurst H, const FbmGrid& grid, const StreamSeed& seed, double truncation, double inner_step);

// Defaults: truncation 50 x grid extent, inner step grid step / 64.
double default_ma_truncation(const FbmGrid& grid);
double default_ma_inner_step(const FbmGrid& grid);

}  // namespace cusploc
