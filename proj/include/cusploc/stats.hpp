#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cusploc {

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

// Sample mean with standard error sd / sqrt(n); summation in index order.
MeanEstimate mean_estimate(std::span<const double> x);

double sample_variance(std::span<const double> x);

// Two-sample Kolmogorov-Smirnov distance sup |F1 - F2|.
double ks_distance(std::vector<double> a, std::vector<double> b);

// One-sample KS distance against a CDF evaluated at the sorted sample.
template <class Cdf>
double ks_distance_to(std::vector<double> a, Cdf cdf);

struct Histogram {
  std::vector<double> edges;    // bins + 1 increasing edges
  std::vector<double> density;  // counts / (total * width)
  std::vector<std::size_t> counts;
  std::size_t total = 0;        // all samples, including those outside the edges
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
};

// Histogram on the given edges; samples exactly on an interior edge go to the right bin.
Histogram histogram(std::span<const double> x, std::vector<double> edges);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = intercept + slope x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

template <class Cdf>
double ks_distance_to(std::vector<double> a, Cdf cdf) {
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace cusploc
