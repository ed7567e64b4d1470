#include "cusploc/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cusploc/error.hpp"

namespace cusploc {

MeanEstimate mean_estimate(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("mean estimate needs at least two values");
  MeanEstimate m;
  m.count = x.size();
  double s = 0.0;
  for (double v : x) s += v;
  m.mean = s / static_cast<double>(x.size());
  m.stderr_ = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
  return m;
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance needs at least two values");
  double s = 0.0;
  for (double v : x) s += v;
  const double mean = s / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS distance needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

Histogram histogram(std::span<const double> x, std::vector<double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw DomainError("histogram needs at least two increasing edges");
  Histogram h;
  h.edges = std::move(edges);
  const std::size_t bins = h.edges.size() - 1;
  h.counts.assign(bins, 0);
  h.total = x.size();
  for (double v : x) {
    if (v < h.edges.front() || v > h.edges.back()) continue;
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t b = static_cast<std::size_t>(it - h.edges.begin());
    b = b == 0 ? 0 : std::min(b - 1, bins - 1);
    ++h.counts[b];
  }
  h.density.resize(bins);
  for (std::size_t b = 0; b < bins; ++b)
    h.density[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(h.total) * h.width(b));
  return h;
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least squares needs matching inputs");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DomainError("least squares needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

}  // namespace cusploc
