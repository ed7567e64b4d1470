#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "cusploc/error.hpp"
#include "cusploc/harness/config.hpp"
#include "cusploc/limit.hpp"
#include "cusploc/rng.hpp"
#include "cusploc/stats.hpp"

namespace cusploc::harness {

// Stream index g reserved for limit-process draws in comparisons.
inline constexpr std::uint32_t kLimitStream = 0xFFFFFFFFu;

// A replication failed; carries the stream seed that reproduces it.
class ReplicationError : public NumericalError {
 public:
  ReplicationError(const std::string& what, StreamSeed seed) : NumericalError(what), seed_(seed) {}
  const StreamSeed& seed() const { return seed_; }

 private:
  StreamSeed seed_;
};

struct ReplicationRecord {
  std::uint32_t g = 0;
  std::uint32_t r = 0;
  double parameter = 0.0;
  double theta_mle = 0.0;
  double theta_bayes = 0.0;
  double normalized_mle = 0.0;
  double normalized_bayes = 0.0;
};

struct RatePoint {
  double parameter = 0.0;
  double phi = 0.0;
  double scale = 0.0;
  double step = 0.0;  // Euler step used for trajectory data, 0 otherwise
  std::size_t replications = 0;
  double mse_mle = 0.0;
  double mse_bayes = 0.0;
  double se_mse_mle = 0.0;
  double se_mse_bayes = 0.0;
  double rmse_mle = 0.0;
  double rmse_bayes = 0.0;
  double bias_mle = 0.0;
  double bias_bayes = 0.0;
  // MSE(BE) - MSE(MLE) with the paired standard error.
  double mse_diff = 0.0;
  double se_mse_diff = 0.0;
};

struct RateFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double theoretical_exponent = 0.0;
  LinearFit bayes_fit;
  std::vector<RatePoint> table;
  // RMSE non-increasing in the asymptotic direction within 2 pooled standard errors.
  bool monotone = true;
};

struct RateExperiment {
  RateFitResult fit;
  std::vector<ReplicationRecord> records;  // (g, r) order
};

// OLS of log y on log x. Throws DomainError for fewer than 3 points, repeated x or nonpositive values.
LinearFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

inline constexpr double kMaxEulerSteps = 1 << 22;

// Euler step for trajectory models: the spec's step if set, otherwise the smaller of the default
// step and scale / resolution, adjusted to divide T. Throws NumericalError above kMaxEulerSteps steps.
double experiment_step(const CuspModelSpec& spec, double resolution);

// One replication: simulate at stream (master, g, r) and estimate.
ReplicationRecord run_replication(const ExperimentConfig& config, std::uint32_t g, std::uint32_t r);

// Summary statistics of one grid point's replications.
RatePoint summarize(const CuspModelSpec& spec, double step, const std::vector<ReplicationRecord>& records);

RateExperiment run_rate_experiment(const ExperimentConfig& config, std::size_t workers = 0);

// |slope - target| <= tolerance, target defaulting to the theoretical exponent. True when no tolerance is set.
bool slope_check(const ExperimentConfig& config, const RateFitResult& fit);

struct ComparisonReport {
  double parameter = 0.0;
  double hurst = 0.0;
  double gamma = 0.0;
  double phi = 0.0;
  double ks_mle = 0.0;
  double ks_bayes = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool unit_scaled = false;
  std::vector<double> errors_mle;
  std::vector<double> errors_bayes;
  LimitSample limit;
  RatePoint point;
};

// Normalized errors at the grid value with the smallest phi against limit draws at the model's (H, gamma).
// With unit_scaled the errors are multiplied by gamma^(1/H) and compared with draws at gamma = 1.
ComparisonReport run_limit_comparison(const ExperimentConfig& config, std::size_t workers = 0,
                                      bool unit_scaled = false);

// KS distances between two independent limit samples (xi_hat, xi_tilde).
std::pair<double, double> limit_self_comparison(Hurst H, double gamma, const ComparisonSettings& settings,
                                                std::uint64_t master, std::size_t workers = 0);

// Index of the grid value with the smallest normalizing rate.
std::size_t finest_grid_index(const ExperimentConfig& config);

}  // namespace cusploc::harness
