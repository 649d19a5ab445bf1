#pragma once

#include <stdexcept>

namespace dfsq {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised when a level's manifold cannot carry a quadrupole shift (j < 1).
class DegenerateManifoldError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Unit conversions at module boundaries. Everything internal is SI.
namespace units {
inline constexpr double gauss = 1e-4;             // T
inline constexpr double milligauss = 1e-7;        // T
inline constexpr double volt_per_mm2 = 1e6;       // V/m^2
inline constexpr double hz_mm2_per_volt = 1e-6;   // Hz m^2 / V
inline constexpr double hz_per_gauss2 = 1e8;      // Hz / T^2
inline constexpr double degree = kPi / 180.0;     // rad

inline constexpr double hz_to_rad_per_s(double hz) { return kTwoPi * hz; }
inline constexpr double rad_per_s_to_hz(double w) { return w / kTwoPi; }
}  // namespace units

/// Landé factor of a fine-structure level, electron g-factor taken as 2.
double lande_g(double L, double S, double J);

/**
 * Physical constants (CODATA 2018) and the ion species data.
 *
 * Constants are passed explicitly to every formula that needs them; the
 * default-constructed value holds the tabulated numbers for 40Ca+.
 */
struct PhysicalConstants {
  double planck_h;            // J s
  double hbar;                // J s
  double bohr_magneton;       // J/T
  double elementary_charge;   // C
  double bohr_radius;         // m
  double coulomb_constant_e2; // e^2 / (4 pi eps0), J m
  double ion_mass;            // kg
  double lande_g_D52;

  PhysicalConstants();

  /// Unit of the quadrupole moment, e a0^2 in C m^2.
  double quadrupole_unit() const { return elementary_charge * bohr_radius * bohr_radius; }

  /// Throws std::invalid_argument if any constant is non-positive.
  void validate() const;
};

/// A Zeeman sublevel |j, m> with half-integers stored doubled.
class ZeemanLevel {
 public:
  ZeemanLevel(int twice_j, int twice_m);

  int twice_j() const { return twice_j_; }
  int twice_m() const { return twice_m_; }
  double j() const { return 0.5 * twice_j_; }
  double m() const { return 0.5 * twice_m_; }

  friend bool operator==(const ZeemanLevel&, const ZeemanLevel&) = default;

 private:
  int twice_j_;
  int twice_m_;
};

/// Orientation of the quantization axis relative to the quadrupole field.
struct FieldGeometry {
  double beta = 0.0;     // rad, quantization axis vs. symmetry axis z
  double epsilon = 0.0;  // asymmetry of the quadrupole potential
  double alpha = 0.0;    // rad, direction of the asymmetry

  void validate() const;
};

struct MagneticEnvironment {
  double bias_field = 0.0;          // T
  double axial_gradient = 0.0;      // T/m, along the ion crystal
  double second_order_coeff = 0.0;  // Hz/T^2, per-state calibrated

  void validate() const;
};

/// [j(j+1) - 3m^2] / [j(2j-1)]; throws DegenerateManifoldError for j < 1.
double quadrupole_geometric_factor(const ZeemanLevel& level);

/// (3 cos^2 beta - 1) - epsilon sin^2 beta cos(2 alpha).
double angular_factor(const FieldGeometry& geometry);

/**
 * Quadrupole shift of a sublevel as an angular frequency (rad/s):
 * (1 / 4 hbar) * gradient * theta * geometric_factor * angular_factor.
 *
 * `gradient` is dE_z/dz in V/m^2, `theta` the moment in C m^2.
 */
double quadrupole_shift(const ZeemanLevel& level, double gradient,
                        const FieldGeometry& geometry, double theta,
                        const PhysicalConstants& constants);

/// m g_J mu_B B / hbar in rad/s, using the D5/2 Landé factor.
double zeeman_shift_first_order(const ZeemanLevel& level, double field,
                                const PhysicalConstants& constants);

}  // namespace dfsq
