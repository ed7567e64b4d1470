#pragma once

#include "cusploc/model_spec.hpp"

namespace cusploc {

struct ModelConstants {
  double gamma_star = 0.0;
  double gamma = 0.0;
  double hurst = 0.0;
  double rate_exponent = 0.0;
  double phi = 0.0;
};

// Squared L2 norm of s -> sgn(s-1)|s-1|^kappa - sgn(s)|s|^kappa over the real line.
double gamma_star_sq(CuspExponent kappa);
double gamma_star(CuspExponent kappa);

// Half-width L of the quadrature core used by gamma_star_sq.
inline constexpr double kGammaStarCore = 1e4;

// Integral of ((s-1)^kappa - s^kappa)^2 over (A, infinity), A > 1, from the
// binomial expansion in 1/s.
double gamma_star_tail(double kappa, double A);

// Scale gamma of the limit process exp(gamma W^H(u) - gamma^2 |u|^{2H} / 2) for the model.
double gamma_for_model(const CuspModelSpec& spec);

// Exponent p in phi = parameter^p.
double rate_exponent(const CuspModelSpec& spec);

// phi = eps^(1/H), n^(-1/(2k+1)) or T^(-1/(2k+1)); eps in the smooth regime.
double normalizing_rate(const CuspModelSpec& spec, double asymptotic_parameter);

// Fisher information of theta at theta0 for the smooth-regime Gaussian signal.
double smooth_fisher_information(const CuspModelSpec& spec);

// Scale at which the estimator actually fluctuates: gamma^(-1/H) phi for cusps,
// eps / sqrt(I) in the smooth regime.
double effective_scale(const CuspModelSpec& spec, double asymptotic_parameter);

ModelConstants model_constants(const CuspModelSpec& spec, double asymptotic_parameter);

}  // namespace cusploc
