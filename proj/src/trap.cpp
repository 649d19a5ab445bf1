#include "dfsq/trap.hpp"

#include <cmath>
#include <stdexcept>

namespace dfsq {

TrapCalibration TrapCalibration::from_reference(double voltage, double omega_z) {
  if (!(voltage > 0.0) || !(omega_z > 0.0))
    throw std::invalid_argument("TrapCalibration: reference voltage and frequency must be > 0");
  return TrapCalibration{omega_z * omega_z / voltage};
}

double axial_frequency(double voltage, const TrapCalibration& calibration) {
  if (voltage < 0.0) throw std::invalid_argument("axial_frequency: negative tip voltage");
  if (!(calibration.k > 0.0)) throw std::invalid_argument("axial_frequency: k must be > 0");
  return std::sqrt(calibration.k * voltage);
}

double field_gradient(double omega_z, const PhysicalConstants& constants) {
  if (omega_z < 0.0) throw std::invalid_argument("field_gradient: negative frequency");
  return -constants.ion_mass * omega_z * omega_z / constants.elementary_charge;
}

double axial_frequency_for_gradient(double gradient, const PhysicalConstants& constants) {
  return std::sqrt(std::abs(gradient) * constants.elementary_charge / constants.ion_mass);
}

double ion_separation(double omega_z, const PhysicalConstants& constants) {
  if (!(omega_z > 0.0))
    throw std::domain_error("ion_separation: zero axial frequency has no equilibrium");
  // e^2 / (2 pi eps0) = 2 * e^2 / (4 pi eps0)
  return std::cbrt(2.0 * constants.coulomb_constant_e2 /
                   (constants.ion_mass * omega_z * omega_z));
}

TrapEnvironment TrapEnvironment::from_voltage(double voltage, const TrapCalibration& calibration,
                                              double stray_gradient) {
  TrapEnvironment env;
  env.omega_z = axial_frequency(voltage, calibration);
  env.stray_gradient = stray_gradient;
  env.tip_voltage = voltage;
  return env;
}

TrapEnvironment TrapEnvironment::from_gradient(double gradient_magnitude,
                                               const PhysicalConstants& constants,
                                               double stray_gradient) {
  if (gradient_magnitude < 0.0)
    throw std::invalid_argument("TrapEnvironment: gradient magnitude must be >= 0");
  TrapEnvironment env;
  env.omega_z = axial_frequency_for_gradient(gradient_magnitude, constants);
  env.stray_gradient = stray_gradient;
  return env;
}

}  // namespace dfsq
