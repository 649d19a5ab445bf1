#pragma once

#include <Eigen/Core>
#include <span>

#include "dfsq/fit_common.hpp"
#include "dfsq/ramsey_sim.hpp"

namespace dfsq {

struct FitConfig {
  /// Frequency scan range in Hz; 0 selects the default (one period over the
  /// span, and the Nyquist frequency of the densest sampling interval).
  double freq_min = 0.0;
  double freq_max = 0.0;
  /// Grid step as a fraction of 1/span (must be <= 1/4).
  double grid_resolution = 0.125;
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-10;
  double step_tolerance = 1e-12;
  double contrast_max = 1.2;
  double damping_min = 0.010;  // s
  double damping_max = 100.0;  // s

  void validate() const;
};

/// Parameter order used by DampedSinusoidFit::covariance and the model Jacobian.
enum DampedSinusoidParam { kContrast = 0, kFrequency, kPhase, kDampingTime, kBaseline };

struct DampedSinusoidParams {
  double contrast = 0.0;
  double frequency = 0.0;     // Hz
  double phase = 0.0;         // rad
  double damping_time = 1.0;  // s
  double baseline = 0.0;

  Eigen::Matrix<double, 5, 1> as_vector() const;
  static DampedSinusoidParams from_vector(const Eigen::Matrix<double, 5, 1>& v);
};

/// C exp(-tau / tau_d) cos(2 pi f tau + phi) + b.
double damped_sinusoid(const DampedSinusoidParams& p, double tau);

/// Analytic d model / d params at `tau`, in DampedSinusoidParam order.
Eigen::Matrix<double, 5, 1> damped_sinusoid_gradient(const DampedSinusoidParams& p, double tau);

struct DampedSinusoidFit {
  DampedSinusoidParams params;
  Eigen::Matrix<double, 5, 5> covariance = Eigen::Matrix<double, 5, 5>::Zero();
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  FitStatus status = FitStatus::converged;
  /// Contrast not significantly above zero: frequency and phase are not meaningful.
  bool zero_contrast = false;
  FitConfig config;

  double error(DampedSinusoidParam which) const;
  bool ok() const { return status == FitStatus::converged && !zero_contrast; }
};

/**
 * Weighted fit of a damped sinusoid to parity data.
 *
 * Starts from a spectral grid scan (floating-mean sinusoid least squares,
 * valid for nonuniform sampling), then runs damped Gauss-Newton with box
 * bounds on contrast and damping time. Throws InsufficientDataError for
 * fewer than 6 points or a span shorter than one period of every
 * admissible frequency.
 */
DampedSinusoidFit fit_damped_sinusoid(std::span<const ParityRecord> data,
                                      const FitConfig& config = {});

inline DampedSinusoidFit fit_damped_sinusoid(const ParityDataset& data,
                                             const FitConfig& config = {}) {
  return fit_damped_sinusoid(std::span<const ParityRecord>(data.records), config);
}

}  // namespace dfsq
