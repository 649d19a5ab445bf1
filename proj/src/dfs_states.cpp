#include "dfsq/dfs_states.hpp"

#include <cmath>
#include <stdexcept>

namespace dfsq {

namespace {
constexpr int kTwiceJ_D52 = 5;

void require_shift_manifold(const ZeemanLevel& level) {
  if (level.twice_j() < 2)
    throw DegenerateManifoldError("phase_rate: level with j < 1 has no quadrupole shift");
  if (level.twice_j() != kTwiceJ_D52)
    throw std::invalid_argument("phase_rate: shift budgets are defined for D5/2 levels only");
}
}  // namespace

BellStateSpec BellStateSpec::in_manifold(int twice_j, int twice_m1, int twice_m2, int twice_m3,
                                         int twice_m4, double phase0, double contrast) {
  BellStateSpec spec{ZeemanLevel(twice_j, twice_m1), ZeemanLevel(twice_j, twice_m2),
                     ZeemanLevel(twice_j, twice_m3), ZeemanLevel(twice_j, twice_m4), phase0,
                     contrast};
  spec.validate();
  return spec;
}

BellStateSpec BellStateSpec::ion_swapped() const {
  return BellStateSpec{m2, m1, m4, m3, phase0, contrast};
}

void BellStateSpec::validate() const {
  if (!(contrast >= 0.0 && contrast <= 1.0))
    throw std::invalid_argument("BellStateSpec: contrast must lie in [0, 1]");
  if (!std::isfinite(phase0)) throw std::invalid_argument("BellStateSpec: non-finite phase");
}

BellStateSpec psi1_state(double contrast, double phase0) {
  return BellStateSpec::in_manifold(kTwiceJ_D52, -5, 3, -1, -1, phase0, contrast);
}

BellStateSpec psi2_state(double contrast, double phase0) {
  return BellStateSpec::in_manifold(kTwiceJ_D52, 3, -5, -1, -1, phase0, contrast);
}

bool is_decoherence_free(const BellStateSpec& spec) {
  return spec.m1.twice_m() + spec.m2.twice_m() == spec.m3.twice_m() + spec.m4.twice_m();
}

double field_sensitivity(const BellStateSpec& spec, const PhysicalConstants& constants) {
  const int twice_dm =
      spec.m1.twice_m() + spec.m2.twice_m() - spec.m3.twice_m() - spec.m4.twice_m();
  return 0.5 * twice_dm * constants.lande_g_D52 * constants.bohr_magneton / constants.hbar;
}

StateShiftBudget phase_rate(const BellStateSpec& spec, const TrapEnvironment& trap,
                            const MagneticEnvironment& magnetic, const FieldGeometry& geometry,
                            double theta, double ion_spacing, const PhysicalConstants& constants) {
  spec.validate();
  for (const auto* level : {&spec.m1, &spec.m2, &spec.m3, &spec.m4}) require_shift_manifold(*level);
  if (!(ion_spacing > 0.0)) throw std::invalid_argument("phase_rate: ion spacing must be > 0");

  const double g_ion = gradient_at_ion(trap.external_gradient(constants));
  auto q = [&](const ZeemanLevel& level) {
    return quadrupole_shift(level, g_ion, geometry, theta, constants);
  };

  StateShiftBudget budget;
  budget.quadrupole = (q(spec.m1) + q(spec.m2)) - (q(spec.m3) + q(spec.m4));

  // Integer m sums keep the uniform term exactly zero for DFS states.
  budget.zeeman_uniform = field_sensitivity(spec, constants) * magnetic.bias_field;
  const double ion2_offset = magnetic.axial_gradient * ion_spacing;
  budget.zeeman_gradient = 0.5 * (spec.m2.twice_m() - spec.m4.twice_m()) *
                           constants.lande_g_D52 * constants.bohr_magneton * ion2_offset /
                           constants.hbar;

  budget.zeeman_second_order =
      kTwoPi * magnetic.second_order_coeff * magnetic.bias_field * magnetic.bias_field;
  budget.total = budget.quadrupole + budget.zeeman_uniform + budget.zeeman_gradient +
                 budget.zeeman_second_order;
  return budget;
}

AverageDifference decompose_average_difference(double delta1, double delta2) {
  return {0.5 * (delta1 + delta2), 0.5 * std::abs(delta1 - delta2)};
}

}  // namespace dfsq
