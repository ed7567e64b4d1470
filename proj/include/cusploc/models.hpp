#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "cusploc/model_spec.hpp"
#include "cusploc/rng.hpp"

namespace cusploc {

// Uniformly sampled path: values[i] observed at t0 + i * step.
struct Trajectory {
  double t0 = 0.0;
  double step = 0.0;
  std::vector<double> values;
  double epsilon = 0.0;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * step; }
  std::size_t increments() const { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const { return static_cast<double>(increments()) * step; }
};

struct EventRecord {
  std::vector<double> events;
  double tau = 1.0;
  std::uint64_t n_periods = 1;
};

struct Sample {
  std::vector<double> values;
};

using ObservedData = std::variant<Trajectory, EventRecord, Sample>;

// a sgn(x)|x|^kappa + h(x): the cusp function shared by the power signal, the
// Poisson intensity, the diffusion drift and the dynamical velocity.
double cusp_function(const CuspModelSpec& spec, double x);

// Gaussian-signal S(theta, t) for the configured signal form.
double signal_value(const CuspModelSpec& spec, double theta, double t);

// Number of steps of size `step` in [0, T]; throws DomainError unless step divides T.
std::size_t steps_in(double horizon, double step);

// Euler scheme for dX = S(theta0, t) dt + eps dW on [t0, t0 + T], X_0 = 0.
Trajectory simulate_gaussian_signal(const CuspModelSpec& spec, double grid_step, const StreamSeed& seed);

// Averages the n period increments of a path on [0, n tau] back onto [0, tau].
Trajectory fold_periods(const Trajectory& path, double tau, std::uint64_t n);

// Constant c making c h(y) exp(a sgn(y)|y|^kappa) a probability density.
double iid_normalizer(const CuspModelSpec& spec);
double iid_density(const CuspModelSpec& spec, double theta, double x);

// Rejection sampler for the i.i.d. cusp density with a wider Gaussian proposal.
class IidSampler {
 public:
  explicit IidSampler(const CuspModelSpec& spec);
  double normalizer() const { return normalizer_; }
  double density(double theta, double x) const;
  // log f(x - theta); -infinity where the density vanishes.
  double log_density(double theta, double x) const;
  Sample sample(std::uint64_t n, const StreamSeed& seed) const;

 private:
  CuspModelSpec spec_;
  double normalizer_ = 0.0;
  double log_normalizer_ = 0.0;
  double proposal_sd_ = 0.0;
  double bound_ = 0.0;
};

Sample simulate_iid(const CuspModelSpec& spec, std::uint64_t n, const StreamSeed& seed);

// tau-periodic intensity lambda(t - theta) with the cusp placed in the first period.
double poisson_intensity(const CuspModelSpec& spec, double theta, double t);
// Integral of lambda(t - theta) over one period [0, tau].
double poisson_period_mass(const CuspModelSpec& spec, double theta);
// Max and min of the intensity on a fine grid over one period.
std::pair<double, double> poisson_intensity_range(const CuspModelSpec& spec, double theta);
EventRecord simulate_poisson(const CuspModelSpec& spec, const StreamSeed& seed);

// Normalizer G of the invariant density G exp(2 int_0^{x - theta} S(z) dz).
double invariant_density_normalizer(const CuspModelSpec& spec);
double invariant_density(const CuspModelSpec& spec, double x);
// Euler-Maruyama after a discarded burn-in; the path starts at the post-burn-in state.
Trajectory simulate_ergodic_diffusion(const CuspModelSpec& spec, double T, double step, double burnin,
                                      const StreamSeed& seed);

// RK4 solution of dx/dt = S(x - theta0) from x0.
Trajectory ode_limit_path(const CuspModelSpec& spec, double T, double step);
Trajectory ode_limit_path(const CuspModelSpec& spec, double theta, double T, double step);
// Checks S > 0 on the reachable state range and beta < min over theta of x_T(theta).
void validate_dynamical(const CuspModelSpec& spec);
Trajectory simulate_dynamical(const CuspModelSpec& spec, double T, double step, const StreamSeed& seed);

// sqrt of the realized quadratic variation per unit time.
double estimate_noise_level(const Trajectory& path);

// Draws one data set for the spec with its default step.
ObservedData simulate(const CuspModelSpec& spec, const StreamSeed& seed);
ObservedData simulate(const CuspModelSpec& spec, double step, const StreamSeed& seed);

}  // namespace cusploc
