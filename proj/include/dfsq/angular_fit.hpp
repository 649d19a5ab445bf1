#pragma once

#include <Eigen/Core>
#include <span>

#include "dfsq/fit_common.hpp"
#include "dfsq/linear_fit.hpp"

namespace dfsq {

/// Delta(beta) = offset + amplitude cos^2(beta - beta0); parameter order
/// (offset, amplitude, beta0). beta0 is reported in [0, pi) with amplitude >= 0.
struct AngularFit {
  double offset = 0.0;     // Hz
  double amplitude = 0.0;  // Hz
  double beta0 = 0.0;      // rad
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  FitStatus status = FitStatus::converged;
  /// Amplitude compatible with zero: beta0 is not determined.
  bool degenerate_amplitude = false;

  double evaluate(double beta) const;
  double beta0_error() const;
};

double angular_model(double offset, double amplitude, double beta0, double beta);

/// Points are (beta in rad, shift in Hz, sigma in Hz). Needs >= 4 points over
/// at least 90 degrees, otherwise InsufficientDataError.
AngularFit fit_angular(std::span<const ScanPoint> points, int max_iterations = 200);

}  // namespace dfsq
