#pragma once

#include <Eigen/Core>
#include <span>

#include "dfsq/fit_common.hpp"

namespace dfsq {

struct ScanPoint {
  double x;
  double y;
  double sigma;
};

/// y = intercept + slope x. Parameter order (slope, intercept).
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double chi2 = 0.0;
  int dof = 0;

  double slope_error() const;
  double intercept_error() const;
};

/**
 * Closed-form weighted least squares with w = 1/sigma^2 and the exact
 * (unscaled) parameter covariance.
 *
 * For the moment pipeline, x is the gradient magnitude in V/mm^2 and y the
 * quadrupole shift in Hz, so the slope comes out in Hz mm^2/V.
 */
LinearFit fit_linear_weighted(std::span<const ScanPoint> points);

/// y = A x^k fitted as a line in (ln x, ln y); requires x, y > 0.
struct PowerLawFit {
  double exponent = 0.0;
  double exponent_error = 0.0;
  double prefactor = 0.0;
  LinearFit log_fit;
};

PowerLawFit fit_power_law(std::span<const ScanPoint> points);

}  // namespace dfsq
