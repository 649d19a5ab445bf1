#pragma once

#include "dfsq/physics.hpp"
#include "dfsq/trap.hpp"

namespace dfsq {

/**
 * Two-ion Bell state (|m1>|m2> + e^{i phase0} |m3>|m4>) / sqrt(2).
 *
 * The first level of each ket belongs to ion 1. Every level carries its own
 * j so that states spanning different manifolds (e.g. S1/2 x D5/2) can be
 * written down; only states entirely inside D5/2 have a shift budget.
 */
struct BellStateSpec {
  ZeemanLevel m1;
  ZeemanLevel m2;
  ZeemanLevel m3;
  ZeemanLevel m4;
  double phase0 = 0.0;   // rad
  double contrast = 1.0; // preparation contrast C0 in [0, 1]

  /// All four levels in the manifold 2j = `twice_j`.
  static BellStateSpec in_manifold(int twice_j, int twice_m1, int twice_m2, int twice_m3,
                                   int twice_m4, double phase0 = 0.0, double contrast = 1.0);

  /// The same state with the two ions' roles exchanged.
  BellStateSpec ion_swapped() const;

  void validate() const;
};

/// (|-5/2>|+3/2> + |-1/2>|-1/2>) / sqrt(2) in D5/2.
BellStateSpec psi1_state(double contrast = 1.0, double phase0 = 0.0);
/// (|+3/2>|-5/2> + |-1/2>|-1/2>) / sqrt(2) in D5/2.
BellStateSpec psi2_state(double contrast = 1.0, double phase0 = 0.0);

/// m1 + m2 == m3 + m4: both kets shift identically in a uniform field.
bool is_decoherence_free(const BellStateSpec& spec);

/// Phase evolution rate of a state split into its physical sources (rad/s).
struct StateShiftBudget {
  double quadrupole = 0.0;
  double zeeman_uniform = 0.0;   // first order in B0, zero for DFS states
  double zeeman_gradient = 0.0;  // first order in the field difference across the crystal
  double zeeman_second_order = 0.0;
  double total = 0.0;
};

/**
 * Relative phase rate [E(m1)+E(m2) - E(m3)-E(m4)] / hbar of the two kets.
 *
 * The quadrupole term uses the doubled gradient at each ion; ion 1 sits in
 * B0 and ion 2 in B0 + B' d.
 */
StateShiftBudget phase_rate(const BellStateSpec& spec, const TrapEnvironment& trap,
                            const MagneticEnvironment& magnetic, const FieldGeometry& geometry,
                            double theta, double ion_spacing, const PhysicalConstants& constants);

/// d(total rate)/d(B0) at fixed B', second-order term excluded (rad/s/T).
double field_sensitivity(const BellStateSpec& spec, const PhysicalConstants& constants);

struct AverageDifference {
  double average;          // (d1 + d2) / 2
  double half_difference;  // |d1 - d2| / 2
};

AverageDifference decompose_average_difference(double delta1, double delta2);

}  // namespace dfsq
