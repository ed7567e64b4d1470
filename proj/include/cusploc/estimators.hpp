#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cusploc/model_spec.hpp"
#include "cusploc/models.hpp"

namespace cusploc {

// Positive continuous prior density on (alpha, beta), up to a constant factor.
struct Prior {
  enum class Kind { Uniform, TruncatedGaussian };
  Kind kind = Kind::Uniform;
  double mean = 0.0;
  double sd = 1.0;
  double scale = 1.0;

  static Prior uniform() { return {}; }
  static Prior truncated_gaussian(double mean, double sd);
  static Prior from_name(const std::string& name, double mean, double sd);

  double operator()(double theta) const;
};

struct LikelihoodCurve {
  std::vector<double> thetas;
  std::vector<double> loglik;
  std::size_t excluded = 0;  // points where the log-likelihood is -infinity
};

struct EstimationOptions {
  double coarse_divisor = 10.0;
  double final_divisor = 1000.0;
  int bayes_refinement = 10;
  std::optional<double> coarse_step;      // overrides scale / coarse_divisor
  std::optional<double> scale;            // overrides the effective fluctuation scale
  Prior prior;
  std::size_t max_coarse_points = std::size_t{1} << 22;
};

struct EstimationResult {
  double theta_mle = 0.0;
  double theta_bayes = 0.0;
  double grid_step_final = 0.0;
  double loglik_at_mle = 0.0;
  double coarse_step = 0.0;
  std::size_t excluded = 0;
  std::optional<std::pair<double, double>> normalized_errors;
};

// Binds a model and one data set; evaluates the log-likelihood at any theta.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const CuspModelSpec& spec, const ObservedData& data);
  ~LikelihoodEvaluator();
  LikelihoodEvaluator(LikelihoodEvaluator&&) noexcept;

  double operator()(double theta) const;
  LikelihoodCurve curve(std::span<const double> thetas) const;

  // Log-likelihood on a grid over (alpha, beta) with spacing at most max_step. For the
  // Gaussian signal the grid is aligned with the sampling times and evaluated by FFT.
  LikelihoodCurve coarse_curve(double max_step, std::size_t max_points) const;

  // epsilon, n or T as seen in the data.
  double asymptotic_parameter() const;
  const CuspModelSpec& spec() const { return spec_; }

 private:
  struct Impl;
  CuspModelSpec spec_;
  const ObservedData* data_;
  std::unique_ptr<Impl> impl_;
};

double log_likelihood(const CuspModelSpec& spec, const ObservedData& data, double theta);

EstimationResult estimate(const CuspModelSpec& spec, const ObservedData& data, const EstimationOptions& options = {},
                          std::optional<double> theta0 = std::nullopt);
double mle(const CuspModelSpec& spec, const ObservedData& data, const EstimationOptions& options = {});
double bayes_estimate(const CuspModelSpec& spec, const ObservedData& data, const Prior& prior,
                      const EstimationOptions& options = {});

// ((mle - theta0) / phi, (bayes - theta0) / phi) with phi = normalizing_rate.
std::pair<double, double> normalized_errors(const CuspModelSpec& spec, double theta_mle, double theta_bayes,
                                            double theta0, double asymptotic_parameter);

// Posterior mean of theta from a curve by the trapezoid rule, stabilized by the max log-likelihood.
double posterior_mean(const LikelihoodCurve& curve, const Prior& prior);

}  // namespace cusploc
