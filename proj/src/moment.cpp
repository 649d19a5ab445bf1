#include "dfsq/moment.hpp"

#include <cmath>
#include <stdexcept>

namespace dfsq {

double MomentResult::total_sigma() const { return std::hypot(stat_sigma, syst_sigma); }

MomentResult extract_moment(double slope, double slope_sigma, double delta_beta,
                            const PhysicalConstants& constants) {
  if (!std::isfinite(slope)) throw std::invalid_argument("extract_moment: non-finite slope");
  if (!(delta_beta >= 0.0)) throw std::invalid_argument("extract_moment: delta_beta must be >= 0");
  if (!(slope_sigma >= 0.0)) throw std::invalid_argument("extract_moment: slope_sigma must be >= 0");

  const double per_slope =
      (5.0 / 12.0) * constants.planck_h * units::hz_mm2_per_volt / constants.quadrupole_unit();
  const double c = std::cos(delta_beta);
  const double misalignment = 0.5 * (3.0 * c * c - 1.0);

  MomentResult r;
  r.theta = per_slope * slope;
  r.stat_sigma = per_slope * slope_sigma;
  r.syst_sigma = std::abs(r.theta) * (1.0 - misalignment);
  r.slope_used = slope;
  r.delta_beta_assumed = delta_beta;
  return r;
}

OffsetDecomposition decompose_offset(double offset_hz, double bias_field,
                                     double second_order_coeff) {
  const double zeeman = second_order_coeff * bias_field * bias_field;
  return {zeeman, offset_hz - zeeman};
}

}  // namespace dfsq
