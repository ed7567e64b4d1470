#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "cusploc/harness/experiment.hpp"

namespace cusploc::harness {

inline constexpr double kGalleryKappas[] = {0.625, 0.5, 0.125, 0.0, -0.375};

struct DensityPanel {
  double hurst = 0.0;
  LimitDensity density;
  std::size_t replications = 0;
};

struct ReportResults {
  std::optional<RateExperiment> rates;
  std::optional<ComparisonReport> comparison;
  std::vector<LimitMoments> moments;
  std::vector<DensityPanel> densities;
  bool signal_gallery = true;
};

// Runs the rate experiment, the comparison (if configured) and the limit-process moment and
// density sweeps from the report settings, all at gamma = 1 for the limit sweeps.
ReportResults compute_report(const ExperimentConfig& config, std::size_t workers = 0);

// Each writer returns the files it produced inside dir.
std::vector<std::filesystem::path> write_rate_report(const RateExperiment& rates, const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_comparison_report(const ComparisonReport& rep,
                                                           const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_moment_report(const std::vector<LimitMoments>& moments,
                                                       const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_density_report(const std::vector<DensityPanel>& panels,
                                                        const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_signal_gallery(const std::filesystem::path& dir);

// Writes every present part; throws IoError when dir cannot be created or written.
std::vector<std::filesystem::path> emit_report(const ReportResults& results, const std::filesystem::path& dir);

}  // namespace cusploc::harness
