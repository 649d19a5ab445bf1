#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dfsq/dfs_states.hpp"
#include "dfsq/physics.hpp"
#include "dfsq/trap.hpp"

namespace dfsq {

struct NoiseModel {
  double d_state_lifetime = 1.168;   // s
  double field_noise_rms = 0.0;      // T, one Gaussian draw per shot
  double extra_dephasing_rate = 0.0; // 1/s, exponential, applied on top of decay

  void validate() const;
};

struct ExperimentPlan {
  std::vector<double> wait_times;  // s, any order, need not be uniform
  std::uint32_t shots = 100;
  std::uint64_t seed = 0;
  NoiseModel noise;
  /// Record the exact expectation instead of sampled estimates.
  bool noiseless = false;
  unsigned threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

struct ParityRecord {
  double tau = 0.0;       // s
  double parity = 0.0;    // estimate in [-1, 1]
  double sigma = 0.0;     // sqrt((1 - parity^2) / shots)
  std::uint32_t shots = 0;
};

/// What a simulated dataset was generated from.
struct SimulationSnapshot {
  std::uint64_t seed = 0;
  bool noiseless = false;
  BellStateSpec state = psi1_state();
  TrapEnvironment trap;
  MagneticEnvironment magnetic;
  FieldGeometry geometry;
  NoiseModel noise;
  double theta = 0.0;        // C m^2
  double ion_spacing = 0.0;  // m
  StateShiftBudget budget;
};

struct ParityDataset {
  std::vector<ParityRecord> records;
  std::optional<SimulationSnapshot> snapshot;  // absent for external data
};

/// Counter-based RNG address of one scan point.
struct PointStream {
  std::uint64_t seed;
  std::uint32_t point;
};

/// Projection-noise standard error of a parity estimate from `shots` shots.
double parity_sigma(double parity, std::uint32_t shots);

/**
 * Expected parity after free precession for `tau`:
 * C0 e^{-2 tau / tau_D} e^{-gamma tau} cos(rate tau + phase0), times the
 * Gaussian dephasing envelope e^{-(lambda_B sigma_B tau)^2 / 2} where
 * lambda_B = d rate / d B0 (identically 1 for decoherence-free states).
 */
double parity_expectation(const BellStateSpec& spec, double rate, double tau,
                          const NoiseModel& noise, const PhysicalConstants& constants);

struct PointEstimate {
  double parity;
  double sigma;
};

/// k ~ Binomial(N, (1 + p) / 2) drawn shot by shot; estimate = 2k/N - 1.
PointEstimate sample_point(double expectation, std::uint32_t shots, PointStream stream);

/// Simulate every wait time of `plan` for `spec`. Records follow plan order.
ParityDataset run_plan(const ExperimentPlan& plan, const BellStateSpec& spec,
                       const TrapEnvironment& trap, const MagneticEnvironment& magnetic,
                       const FieldGeometry& geometry, double theta,
                       const PhysicalConstants& constants);

/// `points` evenly spaced wait times in [start, stop], skipping (gap_begin, gap_end).
std::vector<double> wait_schedule(double start, double stop, std::size_t points,
                                  double gap_begin = 0.0, double gap_end = 0.0);

}  // namespace dfsq
