#include "cusploc/model_spec.hpp"

#include <cmath>

#include "cusploc/error.hpp"

namespace cusploc {

CuspExponent::CuspExponent(double kappa) : kappa_(kappa) {
  if (!(kappa > -0.5 && kappa < 0.5))
    throw DomainError("cusp exponent kappa must lie in (-1/2, 1/2), got " + std::to_string(kappa));
}

Hurst::Hurst(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst parameter must lie in (0, 1), got " + std::to_string(h));
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::GaussianSignal:
      return "gaussian_signal";
    case Variant::IidDensity:
      return "iid_density";
    case Variant::PoissonPeriodic:
      return "poisson_periodic";
    case Variant::ErgodicDiffusion:
      return "ergodic_diffusion";
    case Variant::SmallNoiseDynamical:
      return "small_noise_dynamical";
  }
  return "";
}

std::string to_string(SignalForm f) { return f == SignalForm::Power ? "power" : "cusp_ramp"; }
std::string to_string(Regime r) { return r == Regime::Cusp ? "cusp" : "smooth"; }

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::GaussianSignal, Variant::IidDensity, Variant::PoissonPeriodic, Variant::ErgodicDiffusion,
                    Variant::SmallNoiseDynamical})
    if (to_string(v) == s) return v;
  throw DomainError("unknown model variant '" + s + "'");
}

SignalForm parse_signal_form(const std::string& s) {
  if (s == "power") return SignalForm::Power;
  if (s == "cusp_ramp") return SignalForm::CuspRamp;
  throw DomainError("unknown signal form '" + s + "' (power, cusp_ramp)");
}

Regime parse_regime(const std::string& s) {
  if (s == "cusp") return Regime::Cusp;
  if (s == "smooth") return Regime::Smooth;
  throw DomainError("unknown regime '" + s + "' (cusp, smooth)");
}

void CuspModelSpec::validate() const {
  auto fail = [](const std::string& m) { throw DomainError(m); };
  if (!std::isfinite(a)) fail("amplitude a must be finite");
  if (regime == Regime::Smooth) {
    if (variant != Variant::GaussianSignal || signal_form != SignalForm::Power)
      fail("the smooth regime is available for the power-form Gaussian signal only");
    if (!(kappa > 0.5) || !std::isfinite(kappa)) fail("the smooth regime requires kappa > 1/2");
  } else {
    CuspExponent{kappa};
    if (variant != Variant::GaussianSignal && !(kappa > 0.0))
      fail(to_string(variant) + " requires kappa in (0, 1/2); only the Gaussian signal accepts kappa <= 0");
  }
  if (!(alpha < theta0 && theta0 < beta)) fail("theta0 must lie inside (alpha, beta)");

  switch (variant) {
    case Variant::GaussianSignal:
      if (!(horizon > 0)) fail("horizon T must be positive");
      if (!(epsilon >= 0)) fail("epsilon must be nonnegative");
      if (signal_form == SignalForm::CuspRamp) {
        if (!(delta > 0)) fail("delta must be positive");
        if (!(alpha > t0 + delta && beta < t0 + horizon - delta))
          fail("the cusp-ramp signal requires delta < alpha and beta < T - delta");
      } else if (!(alpha >= t0 && beta <= t0 + horizon)) {
        fail("(alpha, beta) must lie inside the observation window");
      }
      break;
    case Variant::IidDensity:
      if (n < 1) fail("sample size n must be at least 1");
      break;
    case Variant::PoissonPeriodic:
      if (!(tau > 0)) fail("period tau must be positive");
      if (!(alpha > 0 && beta < tau)) fail("Poisson model requires 0 < alpha < beta < tau");
      if (n < 1) fail("period count n must be at least 1");
      break;
    case Variant::ErgodicDiffusion:
      if (!(horizon > 0)) fail("horizon T must be positive");
      break;
    case Variant::SmallNoiseDynamical:
      if (!(horizon > 0)) fail("horizon T must be positive");
      if (!(epsilon >= 0)) fail("epsilon must be nonnegative");
      if (!(alpha > x0)) fail("dynamical model requires alpha > x0");
      break;
  }
  if (step < 0) fail("step must be nonnegative");
  if (!(escape_bound > 0)) fail("escape bound must be positive");
}

double CuspModelSpec::asymptotic_parameter() const {
  switch (variant) {
    case Variant::GaussianSignal:
    case Variant::SmallNoiseDynamical:
      return epsilon;
    case Variant::IidDensity:
    case Variant::PoissonPeriodic:
      return static_cast<double>(n);
    case Variant::ErgodicDiffusion:
      return horizon;
  }
  return 0.0;
}

CuspModelSpec CuspModelSpec::with_asymptotic_parameter(double p) const {
  CuspModelSpec s = *this;
  switch (variant) {
    case Variant::GaussianSignal:
    case Variant::SmallNoiseDynamical:
      s.epsilon = p;
      break;
    case Variant::IidDensity:
    case Variant::PoissonPeriodic:
      if (!(p >= 1) || p != std::floor(p)) throw DomainError("sample size must be a positive integer");
      s.n = static_cast<std::uint64_t>(p);
      break;
    case Variant::ErgodicDiffusion:
      s.horizon = p;
      break;
  }
  return s;
}

double CuspModelSpec::effective_step() const {
  if (step > 0) return step;
  if (variant == Variant::ErgodicDiffusion) return 1e-3;
  return 1e-4 * horizon;
}

double CuspModelSpec::effective_burnin() const {
  if (burnin >= 0) return burnin;
  if (h.kind() == Nuisance::Kind::Linear && h.params()[0] > 0) return 10.0 / h.params()[0];
  return 10.0;
}

double cusp_term(double a, double kappa, double x) {
  if (x == 0.0) return 0.0;
  if (kappa == 0.0) return x > 0 ? a : -a;
  double ax = std::abs(x);
  if (kappa < 0 && ax < 1e-12) ax = 1e-12;
  const double p = a * std::pow(ax, kappa);
  return x > 0 ? p : -p;
}

double cusp_ramp(double kappa, double delta, double x) {
  if (x <= -delta) return 0.0;
  if (x >= delta) return 1.0;
  return 0.5 * (1.0 + cusp_term(1.0, kappa, x / delta));
}

}  // namespace cusploc
