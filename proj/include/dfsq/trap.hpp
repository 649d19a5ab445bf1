#pragma once

#include <optional>

#include "dfsq/physics.hpp"

namespace dfsq {

/// omega_z^2 = k U: the tip voltage to axial frequency map.
struct TrapCalibration {
  double k;  // (rad/s)^2 / V

  /// Calibrate from one measured (voltage, angular frequency) pair.
  static TrapCalibration from_reference(double voltage, double omega_z);
};

double axial_frequency(double voltage, const TrapCalibration& calibration);

/// dE_z/dz = -m omega_z^2 / e, signed (negative for a confining trap).
double field_gradient(double omega_z, const PhysicalConstants& constants);

/// Inverse of field_gradient: the axial frequency that produces |gradient|.
double axial_frequency_for_gradient(double gradient, const PhysicalConstants& constants);

/// Equilibrium distance of a two-ion crystal, (e^2 / (2 pi eps0 m omega_z^2))^(1/3).
double ion_separation(double omega_z, const PhysicalConstants& constants);

/// Gradient seen by one ion of a two-ion crystal at equilibrium: the
/// neighbour's Coulomb field contributes as much as the trap itself.
constexpr double gradient_at_ion(double external_gradient) { return 2.0 * external_gradient; }

/// Operating point of the trap.
struct TrapEnvironment {
  double omega_z = 0.0;                // rad/s
  double stray_gradient = 0.0;         // V/m^2, added to the tip gradient
  std::optional<double> tip_voltage;   // V, when set from a voltage

  static TrapEnvironment from_voltage(double voltage, const TrapCalibration& calibration,
                                      double stray_gradient = 0.0);
  /// `gradient_magnitude` is |dE_z/dz| of the tip field in V/m^2.
  static TrapEnvironment from_gradient(double gradient_magnitude,
                                       const PhysicalConstants& constants,
                                       double stray_gradient = 0.0);

  /// Tip-produced gradient (signed).
  double tip_gradient(const PhysicalConstants& constants) const {
    return field_gradient(omega_z, constants);
  }
  /// Tip plus stray gradient along z.
  double external_gradient(const PhysicalConstants& constants) const {
    return tip_gradient(constants) + stray_gradient;
  }
  double separation(const PhysicalConstants& constants) const {
    return ion_separation(omega_z, constants);
  }
};

}  // namespace dfsq
