#include "cusploc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <spdlog/spdlog.h>

#include "cusploc/error.hpp"

namespace cusploc {
namespace {

double tanh_sinh(const auto& f, double a, double b) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-13);
}

void require(const CuspModelSpec& spec, Variant v) {
  if (spec.variant != v) throw DomainError("operation requires the " + to_string(v) + " variant");
}

}  // namespace

double cusp_function(const CuspModelSpec& spec, double x) { return cusp_term(spec.a, spec.kappa, x) + spec.h(x); }

double signal_value(const CuspModelSpec& spec, double theta, double t) {
  if (spec.signal_form == SignalForm::CuspRamp) return cusp_ramp(spec.kappa, spec.delta, t - theta);
  return cusp_function(spec, t - theta);
}

std::size_t steps_in(double horizon, double step) {
  if (!(step > 0) || !(horizon > 0)) throw DomainError("step and horizon must be positive");
  const double r = horizon / step;
  const double n = std::round(r);
  if (n < 1 || std::abs(r - n) > 1e-6 * std::max(1.0, r))
    throw DomainError("step " + std::to_string(step) + " does not divide horizon " + std::to_string(horizon));
  return static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------- Gaussian signal

Trajectory simulate_gaussian_signal(const CuspModelSpec& spec, double grid_step, const StreamSeed& seed) {
  require(spec, Variant::GaussianSignal);
  spec.validate();
  const std::size_t n = steps_in(spec.horizon, grid_step);
  Trajectory tr;
  tr.t0 = spec.t0;
  tr.step = spec.horizon / static_cast<double>(n);
  tr.epsilon = spec.epsilon;
  tr.values.resize(n + 1);
  Philox4x32 rng(seed, Purpose::GaussianSignal);
  std::vector<double> z(n);
  rng.fill_normal(z);
  const double noise = spec.epsilon * std::sqrt(tr.step);
  double x = 0.0;
  tr.values[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x += signal_value(spec, spec.theta0, tr.time(i)) * tr.step + noise * z[i];
    tr.values[i + 1] = x;
  }
  return tr;
}

Trajectory fold_periods(const Trajectory& path, double tau, std::uint64_t n) {
  if (n < 1) throw DomainError("period count must be positive");
  const std::size_t m = steps_in(tau, path.step);
  if (path.increments() != m * n)
    throw DomainError("path does not cover exactly n periods on a grid commensurate with tau");
  Trajectory out;
  out.t0 = 0.0;
  out.step = path.step;
  out.epsilon = path.epsilon / std::sqrt(static_cast<double>(n));
  out.values.assign(m + 1, 0.0);
  for (std::uint64_t j = 0; j < n; ++j) {
    const double base = path.values[j * m];
    for (std::size_t k = 0; k <= m; ++k) out.values[k] += path.values[j * m + k] - base;
  }
  for (double& v : out.values) v /= static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------- i.i.d.

double iid_normalizer(const CuspModelSpec& spec) {
  require(spec, Variant::IidDensity);
  if (!spec.h.normalizable()) throw ModelError("nuisance '" + spec.h.name() + "' does not give a normalizable density");
  if (!(spec.h(0.0) > 0)) throw ModelError("i.i.d. density requires h(0) > 0");
  auto f = [&](double y) { return spec.h(y) * std::exp(cusp_term(spec.a, spec.kappa, y)); };
  const double reach = 40.0 * spec.h.params()[1] + std::pow(80.0 * std::abs(spec.a), 1.0 / (2.0 - spec.kappa));
  const double mass = tanh_sinh(f, -reach, 0.0) + tanh_sinh(f, 0.0, reach);
  if (!(mass > 0) || !std::isfinite(mass)) throw ModelError("i.i.d. density normalization failed");
  return 1.0 / mass;
}

IidSampler::IidSampler(const CuspModelSpec& spec) : spec_(spec) {
  spec_.validate();
  normalizer_ = iid_normalizer(spec_);
  log_normalizer_ = std::log(normalizer_);
  proposal_sd_ = spec_.h.envelope_sd();
  // f / proposal = K exp(-y^2 / (4 sigma^2) + a sgn(y)|y|^kappa), maximized at |y| = (2 sigma^2 |a| kappa)^(1/(2-kappa)).
  const double sigma = spec_.h.params()[1];
  const double c = spec_.h.params()[0];
  const double k = spec_.kappa;
  const double ystar = std::pow(2.0 * sigma * sigma * std::abs(spec_.a) * k, 1.0 / (2.0 - k));
  const double gmax = std::max(0.0, -ystar * ystar / (4.0 * sigma * sigma) + std::abs(spec_.a) * std::pow(ystar, k));
  bound_ = 1.001 * normalizer_ * c * proposal_sd_ * std::sqrt(2.0 * std::numbers::pi) * std::exp(gmax);
}

double IidSampler::density(double theta, double x) const {
  const double y = x - theta;
  return normalizer_ * spec_.h(y) * std::exp(cusp_term(spec_.a, spec_.kappa, y));
}

double IidSampler::log_density(double theta, double x) const {
  const double y = x - theta;
  const double hv = spec_.h(y);
  if (!(hv > 0)) return -std::numeric_limits<double>::infinity();
  return log_normalizer_ + std::log(hv) + cusp_term(spec_.a, spec_.kappa, y);
}

Sample IidSampler::sample(std::uint64_t n, const StreamSeed& seed) const {
  if (n < 1) throw DomainError("sample size must be positive");
  Philox4x32 rng(seed, Purpose::Iid);
  Sample s;
  s.values.reserve(n);
  std::uint64_t proposals = 0;
  const double norm = 1.0 / (proposal_sd_ * std::sqrt(2.0 * std::numbers::pi));
  while (s.values.size() < n) {
    ++proposals;
    const double y = proposal_sd_ * rng.normal();
    const double q = norm * std::exp(-0.5 * (y / proposal_sd_) * (y / proposal_sd_));
    const double f = density(0.0, y);
    if (f > bound_ * q) throw ModelError("rejection envelope does not dominate the i.i.d. density");
    if (rng.uniform() * bound_ * q <= f) s.values.push_back(spec_.theta0 + y);
  }
  spdlog::debug("i.i.d. rejection sampler acceptance rate {:.4f}",
                static_cast<double>(n) / static_cast<double>(proposals));
  return s;
}

double iid_density(const CuspModelSpec& spec, double theta, double x) {
  require(spec, Variant::IidDensity);
  const double y = x - theta;
  return iid_normalizer(spec) * spec.h(y) * std::exp(cusp_term(spec.a, spec.kappa, y));
}

Sample simulate_iid(const CuspModelSpec& spec, std::uint64_t n, const StreamSeed& seed) {
  require(spec, Variant::IidDensity);
  return IidSampler(spec).sample(n, seed);
}

// ---------------------------------------------------------------- Poisson

double poisson_intensity(const CuspModelSpec& spec, double theta, double t) {
  const double phase = t - spec.tau * std::floor(t / spec.tau);
  return cusp_function(spec, phase - theta);
}

double poisson_period_mass(const CuspModelSpec& spec, double theta) {
  const double k1 = spec.kappa + 1.0;
  const double cusp = spec.a * (std::pow(spec.tau - theta, k1) - std::pow(theta, k1)) / k1;
  return cusp + spec.h.antiderivative(spec.tau - theta) - spec.h.antiderivative(-theta);
}

std::pair<double, double> poisson_intensity_range(const CuspModelSpec& spec, double theta) {
  constexpr int kPoints = 20000;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  auto visit = [&](double t) {
    const double v = cusp_function(spec, t - theta);
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  };
  for (int i = 0; i <= kPoints; ++i) visit(spec.tau * i / kPoints);
  visit(theta);
  return {hi, lo};
}

EventRecord simulate_poisson(const CuspModelSpec& spec, const StreamSeed& seed) {
  require(spec, Variant::PoissonPeriodic);
  spec.validate();
  const auto [hi, lo] = poisson_intensity_range(spec, spec.theta0);
  if (!(lo > 0)) throw ModelError("Poisson intensity must be positive on the whole period (min " + std::to_string(lo) + ")");
  const double bound = 1.001 * hi;
  const double end = spec.tau * static_cast<double>(spec.n);
  Philox4x32 rng(seed, Purpose::Poisson);
  EventRecord rec;
  rec.tau = spec.tau;
  rec.n_periods = spec.n;
  double t = 0.0;
  for (;;) {
    t -= std::log(rng.uniform()) / bound;
    if (t > end) break;
    const double lambda = poisson_intensity(spec, spec.theta0, t);
    if (lambda > bound) throw ModelError("thinning bound exceeded by the Poisson intensity");
    if (rng.uniform() * bound <= lambda) rec.events.push_back(t);
  }
  return rec;
}

// ---------------------------------------------------------------- ergodic diffusion

namespace {

// 2 * integral of S from 0 to y.
double drift_potential(const CuspModelSpec& spec, double y) {
  const double k1 = spec.kappa + 1.0;
  return 2.0 * (spec.a * std::pow(std::abs(y), k1) / k1 + spec.h.antiderivative(y));
}

struct PotentialWindow {
  double lo, hi, peak_at, peak;
};

PotentialWindow potential_window(const CuspModelSpec& spec) {
  constexpr int kPoints = 4000;
  for (double r = 1.0; r <= 1e6; r *= 2.0) {
    double peak = -std::numeric_limits<double>::infinity(), at = 0.0;
    for (int i = 0; i <= kPoints; ++i) {
      const double y = -r + 2.0 * r * i / kPoints;
      const double v = drift_potential(spec, y);
      if (v > peak) {
        peak = v;
        at = y;
      }
    }
    if (drift_potential(spec, -r) < peak - 60.0 && drift_potential(spec, r) < peak - 60.0) return {-r, r, at, peak};
  }
  throw ModelError("diffusion drift is not mean-reverting: invariant density is not normalizable");
}

}  // namespace

double invariant_density_normalizer(const CuspModelSpec& spec) {
  require(spec, Variant::ErgodicDiffusion);
  const auto w = potential_window(spec);
  auto f = [&](double y) { return std::exp(drift_potential(spec, y) - w.peak); };
  std::vector<double> cuts{w.lo, w.hi, 0.0};
  if (w.peak_at > w.lo && w.peak_at < w.hi) cuts.push_back(w.peak_at);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) mass += tanh_sinh(f, cuts[i], cuts[i + 1]);
  return std::exp(-w.peak) / mass;
}

double invariant_density(const CuspModelSpec& spec, double x) {
  return invariant_density_normalizer(spec) * std::exp(drift_potential(spec, x - spec.theta0));
}

Trajectory simulate_ergodic_diffusion(const CuspModelSpec& spec, double T, double step, double burnin,
                                      const StreamSeed& seed) {
  require(spec, Variant::ErgodicDiffusion);
  spec.validate();
  if (!(burnin >= 0)) throw DomainError("burn-in must be nonnegative");
  const std::size_t n = steps_in(T, step);
  const auto nb = static_cast<std::size_t>(std::llround(burnin / step));
  Philox4x32 rng(seed, Purpose::Diffusion);
  const double sq = std::sqrt(step);
  double x = spec.x0;
  auto advance = [&] {
    x += cusp_function(spec, x - spec.theta0) * step + sq * rng.normal();
    if (!(std::abs(x) <= spec.escape_bound))
      throw SimulationError("diffusion path escaped |X| > " + std::to_string(spec.escape_bound) +
                            "; try a smaller step");
  };
  for (std::size_t i = 0; i < nb; ++i) advance();
  Trajectory tr;
  tr.step = step;
  tr.epsilon = 1.0;
  tr.values.resize(n + 1);
  tr.values[0] = x;
  for (std::size_t i = 0; i < n; ++i) {
    advance();
    tr.values[i + 1] = x;
  }
  return tr;
}

// ---------------------------------------------------------------- dynamical system

Trajectory ode_limit_path(const CuspModelSpec& spec, double theta, double T, double step) {
  require(spec, Variant::SmallNoiseDynamical);
  const std::size_t n = steps_in(T, step);
  Trajectory tr;
  tr.step = step;
  tr.values.resize(n + 1);
  double x = spec.x0;
  tr.values[0] = x;
  auto f = [&](double v) { return cusp_function(spec, v - theta); };
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * step * k1);
    const double k3 = f(x + 0.5 * step * k2);
    const double k4 = f(x + step * k3);
    const double next = x + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!(next > x)) throw SimulationError("ODE path stopped increasing; reduce the step");
    x = next;
    tr.values[i + 1] = x;
  }
  return tr;
}

Trajectory ode_limit_path(const CuspModelSpec& spec, double T, double step) {
  return ode_limit_path(spec, spec.theta0, T, step);
}

void validate_dynamical(const CuspModelSpec& spec) {
  require(spec, Variant::SmallNoiseDynamical);
  spec.validate();
  const double step = spec.effective_step();
  constexpr int kThetas = 32;
  double reach = std::numeric_limits<double>::infinity();
  double top = spec.x0;
  for (int i = 0; i <= kThetas; ++i) {
    const double th = spec.alpha + (spec.beta - spec.alpha) * i / kThetas;
    const double xt = ode_limit_path(spec, th, spec.horizon, step).values.back();
    reach = std::min(reach, xt);
    top = std::max(top, xt);
  }
  if (!(spec.beta < reach))
    throw DomainError("dynamical model requires beta < min over theta of x_T(theta) = " + std::to_string(reach));
  constexpr int kPoints = 20000;
  const double lo = spec.x0 - spec.beta;
  const double hi = top - spec.alpha;
  for (int i = 0; i <= kPoints; ++i) {
    const double y = lo + (hi - lo) * i / kPoints;
    if (!(cusp_function(spec, y) > 0)) throw ModelError("dynamical velocity S must be positive on the reachable range");
  }
}

Trajectory simulate_dynamical(const CuspModelSpec& spec, double T, double step, const StreamSeed& seed) {
  require(spec, Variant::SmallNoiseDynamical);
  spec.validate();
  const std::size_t n = steps_in(T, step);
  Philox4x32 rng(seed, Purpose::Dynamical);
  Trajectory tr;
  tr.step = step;
  tr.epsilon = spec.epsilon;
  tr.values.resize(n + 1);
  double x = spec.x0;
  tr.values[0] = x;
  const double noise = spec.epsilon * std::sqrt(step);
  for (std::size_t i = 0; i < n; ++i) {
    x += cusp_function(spec, x - spec.theta0) * step + noise * rng.normal();
    tr.values[i + 1] = x;
  }
  return tr;
}

// ---------------------------------------------------------------- noise level

double estimate_noise_level(const Trajectory& path) {
  const std::size_t n = path.increments();
  if (n < 1) throw DomainError("noise estimation needs at least one increment");
  if (n < 100) spdlog::warn("noise level estimated from only {} increments; precision is poor", n);
  double qv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = path.values[i + 1] - path.values[i];
    qv += d * d;
  }
  return std::sqrt(qv / path.horizon());
}

ObservedData simulate(const CuspModelSpec& spec, double step, const StreamSeed& seed) {
  switch (spec.variant) {
    case Variant::GaussianSignal:
      return simulate_gaussian_signal(spec, step, seed);
    case Variant::IidDensity:
      return simulate_iid(spec, spec.n, seed);
    case Variant::PoissonPeriodic:
      return simulate_poisson(spec, seed);
    case Variant::ErgodicDiffusion:
      return simulate_ergodic_diffusion(spec, spec.horizon, step, spec.effective_burnin(), seed);
    case Variant::SmallNoiseDynamical:
      return simulate_dynamical(spec, spec.horizon, step, seed);
  }
  throw DomainError("unknown variant");
}

ObservedData simulate(const CuspModelSpec& spec, const StreamSeed& seed) {
  return simulate(spec, spec.effective_step(), seed);
}

}  // namespace cusploc
