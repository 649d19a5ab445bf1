#pragma once

#include "dfsq/physics.hpp"

namespace dfsq {

/// Quadrupole moment extracted from the shift-vs-gradient slope; all in e a0^2.
struct MomentResult {
  double theta = 0.0;
  double stat_sigma = 0.0;
  double syst_sigma = 0.0;
  double slope_used = 0.0;          // Hz mm^2 / V
  double delta_beta_assumed = 0.0;  // rad

  double total_sigma() const;
};

/**
 * theta = (5/12) h a for a slope `a` in Hz mm^2/V.
 *
 * An alignment error delta_beta scales the measured slope by
 * (3 cos^2 delta_beta - 1) / 2, so the systematic is theta times one minus
 * that factor. It is one-sided (the slope is underestimated) but quoted as a
 * symmetric error bar.
 */
MomentResult extract_moment(double slope_hz_mm2_per_v, double slope_sigma, double delta_beta,
                            const PhysicalConstants& constants);

struct OffsetDecomposition {
  double second_order_zeeman;  // Hz
  double stray_quadrupole;     // Hz
};

/// Splits the zero-gradient offset into c2 B0^2 and the remainder.
OffsetDecomposition decompose_offset(double offset_hz, double bias_field,
                                     double second_order_coeff);

}  // namespace dfsq
