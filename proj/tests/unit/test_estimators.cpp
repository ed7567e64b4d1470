#include <doctest.h>

#include <cmath>
#include <vector>

#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"
#include "cusploc/estimators.hpp"
#include "cusploc/models.hpp"

using namespace cusploc;

namespace {

CuspModelSpec gauss_spec(double kappa, double eps) {
  CuspModelSpec s;
  s.kappa = kappa;
  s.epsilon = eps;
  return s;
}

Trajectory noise_free(const CuspModelSpec& spec, double step) {
  CuspModelSpec s = spec;
  s.epsilon = 0.0;
  Trajectory tr = simulate_gaussian_signal(s, step, StreamSeed(1));
  tr.epsilon = spec.epsilon;
  return tr;
}

}  // namespace

TEST_CASE("prior densities") {
  CHECK(Prior::uniform()(0.3) == 1.0);
  const Prior g = Prior::truncated_gaussian(0.5, 0.1);
  CHECK(g(0.5) == 1.0);
  CHECK(g(0.6) == doctest::Approx(std::exp(-0.5)));
  CHECK_THROWS_AS(Prior::truncated_gaussian(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(Prior::from_name("cauchy", 0, 1), DomainError);
}

TEST_CASE("posterior mean: symmetric curve and prior scale") {
  LikelihoodCurve c;
  for (int i = -10; i <= 10; ++i) {
    c.thetas.push_back(0.5 + 0.01 * i);
    c.loglik.push_back(-0.5 * i * i / 9.0 + 1e4);
  }
  CHECK(posterior_mean(c, Prior::uniform()) == doctest::Approx(0.5).epsilon(1e-14));
  Prior p = Prior::truncated_gaussian(0.45, 0.05);
  const double m1 = posterior_mean(c, p);
  p.scale = 1e7;
  CHECK(posterior_mean(c, p) == doctest::Approx(m1).epsilon(1e-14));
  CHECK(m1 < 0.5);
}

TEST_CASE("noise-free data: the likelihood peaks at theta0") {
  for (double kappa : {-0.25, 0.0, 0.25}) {
    const CuspModelSpec s = gauss_spec(kappa, 0.1);
    const ObservedData d = noise_free(s, 1e-4);
    const LikelihoodEvaluator ev(s, d);
    const double at = ev(0.5);
    for (double th : {0.3, 0.45, 0.49, 0.51, 0.55, 0.7}) CHECK(ev(th) < at);
  }
}

TEST_CASE("FFT coarse curve equals direct evaluation") {
  const CuspModelSpec s = gauss_spec(0.25, 0.1);
  const ObservedData d = simulate(s, 1e-4, StreamSeed(2));
  const LikelihoodEvaluator ev(s, d);
  for (double step : {1e-2, 3.7e-3, 2.5e-4}) {
    const LikelihoodCurve c = ev.coarse_curve(step, std::size_t{1} << 22);
    REQUIRE(c.thetas.size() > 2);
    CHECK(c.thetas.front() > s.alpha);
    CHECK(c.thetas.back() < s.beta);
    CHECK((c.thetas[1] - c.thetas[0]) <= step * (1 + 1e-12));
    for (std::size_t i = 0; i < c.thetas.size(); i += std::max<std::size_t>(1, c.thetas.size() / 17)) {
      const double direct = ev(c.thetas[i]);
      CHECK(c.loglik[i] == doctest::Approx(direct).epsilon(1e-9).scale(std::abs(direct) + 1.0));
    }
  }
}

TEST_CASE("Poisson likelihood is flat without the cusp") {
  CuspModelSpec s;
  s.variant = Variant::PoissonPeriodic;
  s.a = 0.0;
  s.h = Nuisance::constant(2.0);
  s.alpha = 0.15;
  s.beta = 0.85;
  s.n = 50;
  const ObservedData d = simulate_poisson(s, StreamSeed(3));
  const LikelihoodEvaluator ev(s, d);
  const double ref = ev(0.5);
  for (double th : {0.2, 0.33, 0.61, 0.84}) CHECK(std::abs(ev(th) - ref) < 1e-10);
}

TEST_CASE("tiny noise recovers theta0 to the final grid step") {
  const CuspModelSpec s = gauss_spec(0.25, 1e-4);
  const ObservedData d = simulate(s, 1e-5, StreamSeed(4));
  EstimationOptions o;
  o.scale = 1e-3;
  const EstimationResult r = estimate(s, d, o);
  CHECK(std::abs(r.theta_mle - 0.5) < 1e-5 + r.grid_step_final);
  CHECK(std::abs(r.theta_bayes - 0.5) < 1e-4);
}

TEST_CASE("estimates stay inside (alpha, beta) and the MLE maximizes") {
  for (std::uint32_t rep = 0; rep < 5; ++rep) {
    const CuspModelSpec s = gauss_spec(0.25, 0.5);
    const ObservedData d = simulate(s, 1e-4, StreamSeed(5, 0, rep));
    const EstimationResult r = estimate(s, d);
    CHECK(r.theta_mle > s.alpha);
    CHECK(r.theta_mle < s.beta);
    CHECK(r.theta_bayes > s.alpha);
    CHECK(r.theta_bayes < s.beta);
    const LikelihoodEvaluator ev(s, d);
    CHECK(ev(r.theta_mle) == doctest::Approx(r.loglik_at_mle));
    for (double off : {-2.0, 2.0}) {
      const double th = r.theta_mle + off * r.grid_step_final;
      if (th > s.alpha && th < s.beta) CHECK(ev(th) <= r.loglik_at_mle + 1e-9);
    }
  }
}

TEST_CASE("MLE is invariant under a constant shift of the path") {
  const CuspModelSpec s = gauss_spec(0.25, 0.1);
  Trajectory tr = std::get<Trajectory>(simulate(s, 1e-4, StreamSeed(6)));
  const double m1 = mle(s, tr);
  for (double& v : tr.values) v += 3.0;
  CHECK(mle(s, tr) == m1);
}

TEST_CASE("i.i.d. estimates are shift equivariant") {
  CuspModelSpec s;
  s.variant = Variant::IidDensity;
  s.kappa = 0.25;
  s.h = Nuisance::gaussian_bump(1.0, 1.0);
  s.theta0 = 0.5;
  s.alpha = -1.0;
  s.beta = 2.0;
  s.n = 200;
  Sample x = simulate_iid(s, s.n, StreamSeed(7));
  EstimationOptions o;
  o.coarse_step = 1.0 / 512;
  o.scale = 0.05;
  const EstimationResult r1 = estimate(s, x, o);
  CuspModelSpec t = s;
  t.theta0 += 0.25;
  t.alpha += 0.25;
  t.beta += 0.25;
  for (double& v : x.values) v += 0.25;
  const EstimationResult r2 = estimate(t, x, o);
  CHECK(r2.theta_mle == doctest::Approx(r1.theta_mle + 0.25).epsilon(1e-9));
  CHECK(r2.theta_bayes == doctest::Approx(r1.theta_bayes + 0.25).epsilon(1e-6));
}

TEST_CASE("normalized errors") {
  const CuspModelSpec s = gauss_spec(0.0, 0.1);
  // phi = eps^(1/H) = 0.01 at kappa = 0.
  const auto [m, b] = normalized_errors(s, 0.51, 0.49, 0.5, 0.1);
  CHECK(m == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(-1.0));
  const EstimationResult r = estimate(s, simulate(s, 1e-4, StreamSeed(8)), {}, 0.5);
  REQUIRE(r.normalized_errors);
  CHECK(r.normalized_errors->first == doctest::Approx((r.theta_mle - 0.5) / 0.01));
}

TEST_CASE("bad inputs") {
  const CuspModelSpec s = gauss_spec(0.25, 0.1);
  CHECK_THROWS_AS(log_likelihood(s, simulate(s, 1e-4, StreamSeed(1)), 0.05), DomainError);
  CHECK_THROWS_AS(LikelihoodEvaluator(s, Sample{{1.0}}), DomainError);
  CuspModelSpec z = s;
  z.epsilon = 0.0;
  CHECK_THROWS_AS(LikelihoodEvaluator(z, simulate(s, 1e-4, StreamSeed(1))), DomainError);
}
