#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfsq/damped_sinusoid_fit.hpp"
#include "dfsq/dfs_states.hpp"
#include "dfsq/physics.hpp"
#include "dfsq/ramsey_sim.hpp"
#include "dfsq/trap.hpp"

namespace dfsq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { parity_scan, angle_scan, gradient_scan, extract, fit_only };

std::string_view to_string(RunMode mode);
std::optional<RunMode> parse_run_mode(std::string_view text);

/// Physical dimensions accepted by the unit parser, each with its own
/// closed set of suffixes.
enum class Dimension {
  frequency,          // Hz, kHz, MHz -> Hz
  voltage,            // V, kV -> V
  magnetic_field,     // T, G, mG -> T
  field_gradient,     // T/m, G/m, G/cm -> T/m
  time,               // s, ms, us -> s
  electric_gradient,  // V/m2, Vmm2 -> V/m^2
  angle,              // rad, deg -> rad
  zeeman_coeff,       // Hz/T2, Hz/G2 -> Hz/T^2
  moment,             // ea02 -> multiples of e a0^2
  slope,              // Hzmm2/V -> Hz mm^2/V
  rate,               // 1/s -> 1/s
};

/// "850 kHz" -> 850000. Throws ConfigError on a missing or foreign suffix.
double parse_quantity(std::string_view text, Dimension dim);

/// One `key = value` line of the config file.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

/// Lexical contents of a config file: `[section]` headers, `key = value`
/// lines, `#` comments. Entries before the first header are in section "".
std::vector<ConfigEntry> parse_config_text(const std::string& text);

struct StateConfig {
  int twice_j = 5;
  std::array<int, 4> twice_m{};
  double phase = 0.0;  // rad
  double contrast = 0.9;

  BellStateSpec spec() const;
};

struct RunConfig {
  std::optional<RunMode> mode;
  std::filesystem::path output_dir = "dfsq_out";
  std::uint64_t seed = 1;

  // [trap]
  std::optional<TrapCalibration> calibration;
  std::optional<double> tip_voltage;         // V
  std::optional<double> gradient;            // |dE_z/dz|, V/m^2
  std::vector<double> tip_voltages;          // V
  std::vector<double> gradients;             // V/m^2
  double stray_gradient = 0.0;               // V/m^2

  // [geometry]
  FieldGeometry geometry;
  double beta_offset = 0.0;  // lab angle at which the field is aligned, rad
  double angle_start = 0.0;
  double angle_stop = 0.0;
  std::size_t angle_points = 0;
  double misalignment = 0.0;  // delta_beta assumed for the systematic, rad

  // [magnetic]
  MagneticEnvironment magnetic;

  // [psi1], [psi2]
  StateConfig psi1;
  StateConfig psi2;

  // [plan]
  ExperimentPlan plan;

  // [moment]
  double theta_true = 0.0;  // e a0^2
  std::optional<double> slope;  // Hz mm^2/V
  double slope_sigma = 0.0;

  // [fit]
  FitConfig fit;

  // [input]
  std::optional<std::filesystem::path> input_psi1;
  std::optional<std::filesystem::path> input_psi2;
  std::optional<std::filesystem::path> input_scan;

  /// Every effective setting (explicit or default) in canonical text form.
  std::vector<ConfigEntry> echo;

  /// Trap operating point for single-point modes.
  TrapEnvironment operating_point(const PhysicalConstants& constants) const;
  /// Trap operating points for the gradient scan, in scan order.
  std::vector<TrapEnvironment> scan_points(const PhysicalConstants& constants) const;
  /// Gradient magnitudes (V/m^2) corresponding to scan_points.
  std::vector<double> scan_gradients(const PhysicalConstants& constants) const;
  /// Lab angle schedule of the angle scan (rad).
  std::vector<double> angle_schedule() const;

  /// Replace the seed and keep the echo in sync.
  void override_seed(std::uint64_t seed);
  void override_output_dir(const std::filesystem::path& dir);
};

/// Builds a RunConfig; relative input paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical config text: rerunning from it reproduces the run.
std::string format_config_echo(const RunConfig& config);

}  // namespace dfsq
