#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"

using namespace cusploc;

namespace {

// 40-digit mpmath: Beta and 2F1 closed forms on (0, 1), quadrature on (1, 4097), series beyond.
struct Frozen {
  double kappa;
  double value;
};
constexpr Frozen kFrozen[] = {
    {-0.25, 8.18141327811828517618568646305}, {0.1, 3.37031984802186837339450930918},
    {0.25, 2.98408815439566115259912662472},  {0.4, 3.97829778423368090141400021860},
    {-0.375, 16.4060687832857670803089063500}, {0.125, 3.26006269428356296308760281758},
    {-0.45, 40.5907812872241958507660873816},  {0.45, 6.34645274335055387751868205600},
};

}  // namespace

TEST_CASE("gamma_star_sq at kappa = 0 is the unit jump norm") {
  CHECK(gamma_star_sq(CuspExponent(0.0)) == 4.0);
  CHECK(gamma_star(CuspExponent(0.0)) == 2.0);
}

TEST_CASE("gamma_star_sq matches frozen high-precision values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.kappa);
    CHECK(gamma_star_sq(CuspExponent(f.kappa)) == doctest::Approx(f.value).epsilon(1e-10));
  }
}

TEST_CASE("gamma_star_sq agrees with an independent graded Gauss-Legendre oracle") {
  for (double k : {-0.45, -0.375, -0.25, -0.1, 0.05, 0.1, 0.25, 0.4, 0.45}) {
    CAPTURE(k);
    CHECK(std::abs(gamma_star_sq(CuspExponent(k)) - oracle::gamma_star_sq(k)) < 1e-8);
  }
  for (const auto& f : kFrozen) CHECK(oracle::gamma_star_sq(f.kappa) == doctest::Approx(f.value).epsilon(1e-10));
}

TEST_CASE("series tail matches direct quadrature") {
  for (double k : {-0.25, 0.25, 0.4}) {
    auto f = [k](double s) {
      const double d = std::pow(s, k) * std::expm1(k * std::log1p(-1.0 / s));
      return d * d;
    };
    const double A = 50.0;
    // Map (A, inf) onto (0, 1/A] with s = 1/w.
    double direct = oracle::graded_gauss([&](double w) { return w > 0 ? f(1 / w) / (w * w) : 0.0; }, 0.0, 1 / A);
    const double u = 0.5 / A * std::ldexp(1.0, -60);
    direct += k * k * std::pow(u, 1 - 2 * k) / (1 - 2 * k);
    CAPTURE(k);
    CHECK(gamma_star_tail(k, A) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("cusp exponent domain") {
  CHECK_THROWS_AS(CuspExponent(0.5), DomainError);
  CHECK_THROWS_AS(CuspExponent(-0.5), DomainError);
  CHECK_NOTHROW(CuspExponent(0.49));
}

TEST_CASE("gamma per model") {
  CuspModelSpec s;
  s.kappa = 0.25;
  s.a = 2.0;
  CHECK(gamma_for_model(s) == doctest::Approx(2.0 * gamma_star(CuspExponent(0.25))));
  s.a = -2.0;
  CHECK(gamma_for_model(s) == doctest::Approx(2.0 * gamma_star(CuspExponent(0.25))));

  CuspModelSpec ramp;
  ramp.signal_form = SignalForm::CuspRamp;
  ramp.kappa = 0.0;
  ramp.delta = 1.0;
  ramp.t0 = 0.0;
  ramp.horizon = 10.0;
  ramp.alpha = 2.0;
  ramp.theta0 = 5.0;
  ramp.beta = 8.0;
  CHECK(gamma_for_model(ramp) == doctest::Approx(1.0));
  ramp.kappa = 0.25;
  ramp.delta = 0.5;
  CHECK(gamma_for_model(ramp) == doctest::Approx(gamma_star(CuspExponent(0.25)) / (2 * std::pow(0.5, 0.25))));

  CuspModelSpec p;
  p.variant = Variant::PoissonPeriodic;
  p.kappa = 0.25;
  p.a = 2.0;
  p.h = Nuisance::constant(4.0);
  CHECK(gamma_for_model(p) == doctest::Approx(gamma_star(CuspExponent(0.25))));
}

TEST_CASE("normalizing rates") {
  CuspModelSpec s;
  s.kappa = 0.0;
  CHECK(normalizing_rate(s, 0.1) == doctest::Approx(0.01));
  s.kappa = 0.25;
  CHECK(rate_exponent(s) == doctest::Approx(4.0 / 3.0));
  CHECK(normalizing_rate(s, 0.1) == doctest::Approx(std::pow(0.1, 4.0 / 3.0)));
  s.variant = Variant::PoissonPeriodic;
  s.alpha = 0.1;
  s.beta = 0.9;
  s.tau = 1.0;
  CHECK(normalizing_rate(s, 64) == doctest::Approx(std::pow(64.0, -2.0 / 3.0)));
  CHECK_THROWS_AS(normalizing_rate(s, 0.0), DomainError);

  CuspModelSpec sm;
  sm.regime = Regime::Smooth;
  sm.kappa = 0.75;
  CHECK(normalizing_rate(sm, 0.05) == doctest::Approx(0.05));
  CHECK(smooth_fisher_information(sm) == doctest::Approx(2 * 0.5625 * std::pow(0.5, 0.5) / 0.5).epsilon(1e-8));
}
