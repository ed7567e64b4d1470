#include <doctest.h>

#include <cmath>
#include <vector>

#include "cusploc/error.hpp"
#include "cusploc/rng.hpp"
#include "cusploc/stats.hpp"

using namespace cusploc;

TEST_CASE("mean estimate and variance") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m = mean_estimate(x);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.count == 4);
}

TEST_CASE("two-sample KS distance") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_distance({1, 3}, {2, 4}) == doctest::Approx(0.5));
  // Ties across samples step together.
  CHECK(ks_distance({0, 0, 1}, {0, 1, 1}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("histogram densities integrate to one") {
  Philox4x32 g(StreamSeed(3), Purpose::Test);
  std::vector<double> x(10000);
  g.fill_normal(x);
  std::vector<double> edges;
  for (int i = -40; i <= 40; ++i) edges.push_back(i * 0.25);
  const Histogram h = histogram(x, edges);
  double area = 0.0;
  for (std::size_t b = 0; b < h.density.size(); ++b) area += h.density[b] * h.width(b);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.total == x.size());

  const Histogram e = histogram(std::vector<double>{0.0, 1.0}, {0.0, 1.0, 2.0});
  CHECK(e.counts[0] == 1);
  CHECK(e.counts[1] == 1);
}

TEST_CASE("ordinary least squares") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const LinearFit f = ols(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(ols(std::vector<double>{1}, std::vector<double>{1}), DomainError);
}
