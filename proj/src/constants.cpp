#include "cusploc/constants.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cusploc/error.hpp"
#include "cusploc/models.hpp"

namespace cusploc {
namespace {

double tanh_sinh(const auto& f, double a, double b) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-14);
}

double gauss_kronrod(const auto& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-14);
}

}  // namespace

double gamma_star_tail(double kappa, double A) {
  constexpr int kTerms = 14;
  std::array<double, kTerms + 1> b{};
  double binom = 1.0;
  for (int k = 1; k <= kTerms; ++k) {
    binom *= (kappa - (k - 1)) / k;
    b[k] = (k % 2 == 0) ? binom : -binom;
  }
  double tail = 0.0;
  for (int m = kTerms; m >= 2; --m) {
    double c = 0.0;
    for (int j = 1; j < m; ++j) c += b[j] * b[m - j];
    tail += c * std::pow(A, 2 * kappa + 1 - m) / (m - 1 - 2 * kappa);
  }
  return tail;
}

double gamma_star_sq(CuspExponent kappa_) {
  const double k = kappa_.value();
  if (k == 0.0) return 4.0;
  // On (0, 1) the integrand is ((1-s)^k + s^k)^2, symmetric about 1/2.
  auto inner = [k](double s) {
    const double v = std::pow(1.0 - s, k) + std::pow(s, k);
    return v * v;
  };
  // On (1, inf): ((s-1)^k - s^k)^2, written to avoid cancellation for large s.
  auto outer = [k](double s) {
    const double d = std::pow(s, k) * std::expm1(k * std::log1p(-1.0 / s));
    return d * d;
  };
  // On (1, 2) in v = s - 1 so the endpoint singularity stays resolvable.
  auto near = [k](double v) {
    const double d = std::pow(v, k) - std::pow(1.0 + v, k);
    return d * d;
  };
  const double core = 2.0 * tanh_sinh(inner, 0.0, 0.5);
  const double A = kGammaStarCore + 1.0;
  double right = tanh_sinh(near, 0.0, 1.0);
  for (double lo = 2.0; lo < A; lo *= 2.0) right += gauss_kronrod(outer, lo, std::min(2.0 * lo, A));
  // The negative half-line mirrors (1, inf) under s -> 1 - s.
  return core + 2.0 * (right + gamma_star_tail(k, A));
}

double gamma_star(CuspExponent kappa) { return std::sqrt(gamma_star_sq(kappa)); }

double gamma_for_model(const CuspModelSpec& spec) {
  spec.validate();
  if (spec.regime == Regime::Smooth) throw DomainError("gamma is undefined in the smooth regime");
  if (spec.a == 0.0 && !(spec.variant == Variant::GaussianSignal && spec.signal_form == SignalForm::CuspRamp))
    throw DomainError("gamma requires a nonzero cusp amplitude a");
  const double gs = gamma_star(spec.cusp_exponent());
  const double a = std::abs(spec.a);
  auto h0_positive = [&] {
    const double h0 = spec.h(0.0);
    if (!(h0 > 0)) throw DomainError("gamma requires h(0) > 0 for " + to_string(spec.variant));
    return h0;
  };
  switch (spec.variant) {
    case Variant::GaussianSignal:
      if (spec.signal_form == SignalForm::CuspRamp) return gs / (2.0 * std::pow(spec.delta, spec.kappa));
      return a * gs;
    case Variant::IidDensity:
      return a * gs * std::sqrt(iid_normalizer(spec) * h0_positive());
    case Variant::PoissonPeriodic:
      return a * gs / std::sqrt(h0_positive());
    case Variant::ErgodicDiffusion:
      return a * gs * std::sqrt(invariant_density_normalizer(spec));
    case Variant::SmallNoiseDynamical:
      return a * gs / std::sqrt(h0_positive());
  }
  return 0.0;
}

double rate_exponent(const CuspModelSpec& spec) {
  if (spec.regime == Regime::Smooth) return 1.0;
  if (spec.small_noise()) return 1.0 / spec.hurst();
  return -1.0 / (2.0 * spec.kappa + 1.0);
}

double normalizing_rate(const CuspModelSpec& spec, double p) {
  if (!(p > 0) || !std::isfinite(p)) throw DomainError("asymptotic parameter must be positive");
  return std::pow(p, rate_exponent(spec));
}

double smooth_fisher_information(const CuspModelSpec& spec) {
  if (spec.regime != Regime::Smooth) throw DomainError("Fisher information is only finite in the smooth regime");
  const double th = spec.theta0;
  auto f = [&](double t) {
    const double x = t - th;
    const double d = spec.a * spec.kappa * std::pow(std::abs(x), spec.kappa - 1.0) + spec.h.derivative(x);
    return d * d;
  };
  return tanh_sinh(f, spec.t0, th) + tanh_sinh(f, th, spec.t0 + spec.horizon);
}

double effective_scale(const CuspModelSpec& spec, double p) {
  const double phi = normalizing_rate(spec, p);
  if (spec.regime == Regime::Smooth) return phi / std::sqrt(smooth_fisher_information(spec));
  return std::pow(gamma_for_model(spec), -1.0 / spec.hurst()) * phi;
}

ModelConstants model_constants(const CuspModelSpec& spec, double p) {
  ModelConstants c;
  c.hurst = spec.hurst();
  c.rate_exponent = rate_exponent(spec);
  c.phi = normalizing_rate(spec, p);
  if (spec.regime == Regime::Cusp) {
    c.gamma_star = gamma_star(spec.cusp_exponent());
    c.gamma = gamma_for_model(spec);
  } else {
    c.gamma_star = std::numeric_limits<double>::quiet_NaN();
    c.gamma = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace cusploc
