#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cusploc/estimators.hpp"
#include "cusploc/model_spec.hpp"

namespace cusploc::harness {

inline constexpr int kConfigVersion = 1;

struct ComparisonSettings {
  std::size_t limit_replications = 10000;
  double ks_threshold = 0.08;
  std::size_t grid_size = 1025;
  std::optional<double> window;
};

struct EstimationSettings {
  std::string prior = "uniform";
  double prior_mean = 0.5;
  double prior_sd = 0.1;
  double coarse_divisor = 10.0;
  double final_divisor = 1000.0;
  int bayes_refinement = 10;
  // Euler steps per fluctuation scale for small-noise models.
  double resolution = 20.0;
};

struct Thresholds {
  std::optional<double> slope_target;
  std::optional<double> slope_tolerance;
};

struct ReportSettings {
  std::vector<double> moment_hurst{0.5, 0.6, 0.7, 0.8};
  std::vector<double> density_hurst{0.5, 0.75};
  std::size_t limit_replications = 2000;
  std::size_t grid_size = 1025;
  std::size_t bins = 41;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  CuspModelSpec model;
  std::vector<double> grid{0.1, 0.05, 0.025, 0.0125};
  std::size_t replications = 400;
  std::uint64_t seed = 1;
  std::string outputs = "out";
  std::optional<ComparisonSettings> comparison;
  EstimationSettings estimation;
  Thresholds thresholds;
  ReportSettings report;

  // Throws ConfigError on any violated invariant.
  void validate() const;

  EstimationOptions estimation_options() const;
};

// Default asymptotic grid: eps for small-noise models, n for i.i.d. and Poisson, T for the diffusion.
std::vector<double> default_grid(Variant v);

CuspModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const CuspModelSpec& spec);

// Unknown keys, wrong types and bad values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace cusploc::harness
