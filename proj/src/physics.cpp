#include "dfsq/physics.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace dfsq {

namespace {
// CODATA 2018 and AME2016.
constexpr double kPlanck = 6.62607015e-34;
constexpr double kBohrMagneton = 9.2740100783e-24;
constexpr double kElementaryCharge = 1.602176634e-19;
constexpr double kBohrRadius = 5.29177210903e-11;
constexpr double kVacuumPermittivity = 8.8541878128e-12;
constexpr double kAtomicMassUnit = 1.66053906660e-27;
constexpr double kElectronMass = 9.1093837015e-31;
constexpr double kCa40AtomicMass = 39.962590863;  // u, neutral atom
}  // namespace

double lande_g(double L, double S, double J) {
  if (J <= 0.0) throw std::invalid_argument("lande_g: J must be positive");
  const double jj = J * (J + 1.0);
  return 1.0 + (jj + S * (S + 1.0) - L * (L + 1.0)) / (2.0 * jj);
}

PhysicalConstants::PhysicalConstants()
    : planck_h(kPlanck),
      hbar(kPlanck / kTwoPi),
      bohr_magneton(kBohrMagneton),
      elementary_charge(kElementaryCharge),
      bohr_radius(kBohrRadius),
      coulomb_constant_e2(kElementaryCharge * kElementaryCharge /
                          (4.0 * kPi * kVacuumPermittivity)),
      ion_mass(kCa40AtomicMass * kAtomicMassUnit - kElectronMass),
      lande_g_D52(lande_g(2.0, 0.5, 2.5)) {}

void PhysicalConstants::validate() const {
  const double values[] = {planck_h,    hbar,
                           bohr_magneton, elementary_charge,
                           bohr_radius, coulomb_constant_e2,
                           ion_mass,    lande_g_D52};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("PhysicalConstants: all constants must be positive");
  }
}

ZeemanLevel::ZeemanLevel(int twice_j, int twice_m) : twice_j_(twice_j), twice_m_(twice_m) {
  if (twice_j < 0) throw std::invalid_argument("ZeemanLevel: j must be non-negative");
  if (std::abs(twice_m) > twice_j)
    throw std::invalid_argument("ZeemanLevel: |m| exceeds j (2j=" + std::to_string(twice_j) +
                                ", 2m=" + std::to_string(twice_m) + ")");
  if ((twice_j - twice_m) % 2 != 0)
    throw std::invalid_argument("ZeemanLevel: j and m must both be integer or half-integer");
}

void FieldGeometry::validate() const {
  if (!std::isfinite(beta) || !std::isfinite(alpha) || !std::isfinite(epsilon))
    throw std::invalid_argument("FieldGeometry: non-finite angle or asymmetry");
  if (epsilon < 0.0) throw std::invalid_argument("FieldGeometry: epsilon must be >= 0");
}

void MagneticEnvironment::validate() const {
  if (!(bias_field >= 0.0)) throw std::invalid_argument("MagneticEnvironment: bias_field < 0");
  if (!std::isfinite(axial_gradient) || !std::isfinite(second_order_coeff))
    throw std::invalid_argument("MagneticEnvironment: non-finite coefficient");
}

double quadrupole_geometric_factor(const ZeemanLevel& level) {
  if (level.twice_j() < 2)
    throw DegenerateManifoldError("quadrupole shift undefined for j < 1");
  // In doubled units: [J(J+2) - 3M^2] / [2J(J-1)] with J = 2j, M = 2m.
  const int tj = level.twice_j();
  const int tm = level.twice_m();
  return static_cast<double>(tj * (tj + 2) - 3 * tm * tm) / static_cast<double>(2 * tj * (tj - 1));
}

double angular_factor(const FieldGeometry& geometry) {
  const double c = std::cos(geometry.beta);
  const double s = std::sin(geometry.beta);
  return (3.0 * c * c - 1.0) - geometry.epsilon * s * s * std::cos(2.0 * geometry.alpha);
}

double quadrupole_shift(const ZeemanLevel& level, double gradient, const FieldGeometry& geometry,
                        double theta, const PhysicalConstants& constants) {
  const double factor = quadrupole_geometric_factor(level);
  return 0.25 * gradient * theta * factor * angular_factor(geometry) / constants.hbar;
}

double zeeman_shift_first_order(const ZeemanLevel& level, double field,
                                const PhysicalConstants& constants) {
  return level.m() * constants.lande_g_D52 * constants.bohr_magneton * field / constants.hbar;
}

}  // namespace dfsq
