#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dfsq/angular_fit.hpp"
#include "dfsq/config.hpp"
#include "dfsq/damped_sinusoid_fit.hpp"
#include "dfsq/linear_fit.hpp"
#include "dfsq/moment.hpp"
#include "dfsq/ramsey_sim.hpp"

namespace dfsq {

/// A fit that either produced a result or failed with a recorded reason.
struct FitOutcome {
  std::optional<DampedSinusoidFit> fit;
  std::string error;

  bool ok() const { return fit && fit->ok(); }
};

FitOutcome try_fit(const ParityDataset& data, const FitConfig& config);

/// Fitted frequency in Hz and its 1 sigma error of one Ramsey measurement.
struct FrequencyMeasurement {
  ParityDataset psi1;
  ParityDataset psi2;
  FitOutcome fit1;
  FitOutcome fit2;
  double true_rate1_hz = 0.0;  // model rates, for reference only
  double true_rate2_hz = 0.0;

  bool ok() const { return fit1.ok() && fit2.ok(); }
  /// (f1 + f2) / 2 and its error.
  double average_hz() const;
  double average_sigma_hz() const;
  /// |f1 - f2| / 2 and its error.
  double half_difference_hz() const;
  double half_difference_sigma_hz() const;
};

/// Simulate and fit the psi1 / psi2 pair at one operating point.
/// `seed_index` selects independent RNG streams for the pair.
FrequencyMeasurement measure_pair(const RunConfig& config, const TrapEnvironment& trap,
                                  const FieldGeometry& geometry, std::uint64_t seed_index,
                                  unsigned threads, const PhysicalConstants& constants);

struct ParityScanResult {
  FrequencyMeasurement measurement;
};

struct AngleScanResult {
  std::vector<double> lab_angles;          // rad
  std::vector<FrequencyMeasurement> points;
  std::vector<ScanPoint> shifts;           // (lab angle, Delta Hz, sigma Hz), fitted points only
  std::optional<AngularFit> fit;
  std::string fit_error;
};

struct GradientScanResult {
  std::vector<double> gradients;           // |dE_z/dz|, V/mm^2
  std::vector<FrequencyMeasurement> points;
  std::vector<ScanPoint> shifts;           // (gradient, Delta, sigma)
  std::vector<ScanPoint> gradient_parts;   // (gradient, Delta_B', sigma)
  std::optional<LinearFit> linear;
  std::optional<PowerLawFit> power_law;
  std::optional<MomentResult> moment;
  std::optional<OffsetDecomposition> offset;
  std::string fit_error;
};

struct ExtractResult {
  std::vector<ScanPoint> shifts;  // empty when a slope was given directly
  std::optional<LinearFit> linear;
  MomentResult moment;
  std::optional<OffsetDecomposition> offset;
};

struct FitOnlyResult {
  std::optional<ParityDataset> psi1;
  std::optional<ParityDataset> psi2;
  FitOutcome fit1;
  FitOutcome fit2;
  std::optional<AverageDifference> decomposition;  // Hz
  std::optional<ExtractResult> extraction;
};

ParityScanResult run_parity_scan(const RunConfig& config, unsigned threads = 1,
                                 const PhysicalConstants& constants = {});
AngleScanResult run_angle_scan(const RunConfig& config, unsigned threads = 1,
                               const PhysicalConstants& constants = {});
GradientScanResult run_gradient_scan(const RunConfig& config, unsigned threads = 1,
                                     const PhysicalConstants& constants = {});
/// Moment from [moment] slope, or from a linear fit of the [input] scan table.
ExtractResult run_extract(const RunConfig& config, const PhysicalConstants& constants = {});
/// Fits external parity datasets and/or a scan table; never simulates.
FitOnlyResult run_fit_only(const RunConfig& config, const PhysicalConstants& constants = {});

struct RunOptions {
  unsigned threads = 1;
  bool emit_plot_data = false;
};

/// Exit codes of a run.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 2, kExitFitFailure = 3 };

/**
 * Runs `mode`, writes all outputs under config.output_dir and returns the exit
 * code. Fit failures are recorded in the outputs and reported as
 * kExitFitFailure; configuration problems throw ConfigError.
 */
int execute(RunMode mode, const RunConfig& config, const RunOptions& options);

}  // namespace dfsq
