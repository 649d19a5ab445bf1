#include "dfsq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dfsq/dataset_io.hpp"
#include "dfsq/parallel.hpp"
#include "dfsq/rng.hpp"

namespace dfsq {

using nlohmann::ordered_json;

FitOutcome try_fit(const ParityDataset& data, const FitConfig& config) {
  FitOutcome out;
  try {
    out.fit = fit_damped_sinusoid(data, config);
    if (out.fit->status != FitStatus::converged)
      out.error = "fit status " + std::string(to_string(out.fit->status));
    else if (out.fit->zero_contrast)
      out.error = "contrast not significant";
  } catch (const FitError& e) {
    out.error = e.what();
  }
  return out;
}

double FrequencyMeasurement::average_hz() const {
  return 0.5 * (fit1.fit->params.frequency + fit2.fit->params.frequency);
}
double FrequencyMeasurement::average_sigma_hz() const {
  return 0.5 * std::hypot(fit1.fit->error(kFrequency), fit2.fit->error(kFrequency));
}
double FrequencyMeasurement::half_difference_hz() const {
  return decompose_average_difference(fit1.fit->params.frequency, fit2.fit->params.frequency)
      .half_difference;
}
double FrequencyMeasurement::half_difference_sigma_hz() const { return average_sigma_hz(); }

FrequencyMeasurement measure_pair(const RunConfig& config, const TrapEnvironment& trap,
                                  const FieldGeometry& geometry, std::uint64_t seed_index,
                                  unsigned threads, const PhysicalConstants& constants) {
  const double theta = config.theta_true * constants.quadrupole_unit();
  FrequencyMeasurement m;
  ExperimentPlan plan = config.plan;
  plan.threads = threads;

  plan.seed = derive_seed(config.seed, 2 * seed_index);
  m.psi1 = run_plan(plan, config.psi1.spec(), trap, config.magnetic, geometry, theta, constants);
  plan.seed = derive_seed(config.seed, 2 * seed_index + 1);
  m.psi2 = run_plan(plan, config.psi2.spec(), trap, config.magnetic, geometry, theta, constants);

  m.true_rate1_hz = units::rad_per_s_to_hz(m.psi1.snapshot->budget.total);
  m.true_rate2_hz = units::rad_per_s_to_hz(m.psi2.snapshot->budget.total);
  m.fit1 = try_fit(m.psi1, config.fit);
  m.fit2 = try_fit(m.psi2, config.fit);
  return m;
}

ParityScanResult run_parity_scan(const RunConfig& config, unsigned threads,
                                 const PhysicalConstants& constants) {
  config.geometry.validate();
  return {measure_pair(config, config.operating_point(constants), config.geometry, 0, threads,
                       constants)};
}

AngleScanResult run_angle_scan(const RunConfig& config, unsigned threads,
                               const PhysicalConstants& constants) {
  AngleScanResult r;
  r.lab_angles = config.angle_schedule();
  if (r.lab_angles.size() < 4) throw ConfigError("[geometry] angle_points must be >= 4");
  if (std::abs(config.angle_stop - config.angle_start) < 0.5 * kPi - 1e-12)
    throw ConfigError("[geometry] angle schedule must span at least 90 deg");
  const TrapEnvironment trap = config.operating_point(constants);

  r.points.resize(r.lab_angles.size());
  parallel_for(r.lab_angles.size(), threads, [&](std::size_t i) {
    FieldGeometry g = config.geometry;
    g.beta = r.lab_angles[i] - config.beta_offset;
    r.points[i] = measure_pair(config, trap, g, i, 1, constants);
  });
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& m = r.points[i];
    if (m.ok()) r.shifts.push_back({r.lab_angles[i], m.average_hz(), m.average_sigma_hz()});
  }
  try {
    r.fit = fit_angular(r.shifts);
    if (r.fit->status != FitStatus::converged || r.fit->degenerate_amplitude)
      r.fit_error = r.fit->degenerate_amplitude ? "angular amplitude not significant"
                                                : "angular fit did not converge";
  } catch (const FitError& e) {
    r.fit_error = e.what();
  }
  return r;
}

GradientScanResult run_gradient_scan(const RunConfig& config, unsigned threads,
                                     const PhysicalConstants& constants) {
  GradientScanResult r;
  const auto traps = config.scan_points(constants);
  if (traps.size() < 4) throw ConfigError("[trap] gradient scan needs >= 4 gradients or voltages");
  config.geometry.validate();

  r.points.resize(traps.size());
  parallel_for(traps.size(), threads, [&](std::size_t i) {
    r.points[i] = measure_pair(config, traps[i], config.geometry, i, 1, constants);
  });
  const auto magnitudes = config.scan_gradients(constants);
  for (std::size_t i = 0; i < traps.size(); ++i) {
    const double g = magnitudes[i] / units::volt_per_mm2;
    r.gradients.push_back(g);
    const auto& m = r.points[i];
    if (!m.ok()) continue;
    r.shifts.push_back({g, m.average_hz(), m.average_sigma_hz()});
    r.gradient_parts.push_back({g, m.half_difference_hz(), m.half_difference_sigma_hz()});
  }

  try {
    r.linear = fit_linear_weighted(r.shifts);
    r.moment = extract_moment(r.linear->slope, r.linear->slope_error(), config.misalignment,
                              constants);
    r.offset = decompose_offset(r.linear->intercept, config.magnetic.bias_field,
                                config.magnetic.second_order_coeff);
  } catch (const FitError& e) {
    r.fit_error = e.what();
  }
  const bool positive = !r.gradient_parts.empty() &&
                        std::all_of(r.gradient_parts.begin(), r.gradient_parts.end(),
                                    [](const ScanPoint& p) { return p.y > 0.0; });
  if (positive) {
    try {
      r.power_law = fit_power_law(r.gradient_parts);
    } catch (const FitError& e) {
      if (r.fit_error.empty()) r.fit_error = e.what();
    }
  }
  return r;
}

namespace {

ExtractResult extract_from_scan(std::vector<ScanPoint> shifts, const RunConfig& config,
                                const PhysicalConstants& constants) {
  ExtractResult r;
  r.shifts = std::move(shifts);
  r.linear = fit_linear_weighted(r.shifts);
  r.moment = extract_moment(r.linear->slope, r.linear->slope_error(), config.misalignment,
                            constants);
  r.offset = decompose_offset(r.linear->intercept, config.magnetic.bias_field,
                              config.magnetic.second_order_coeff);
  return r;
}

ParityDataset load_dataset(const std::filesystem::path& path) {
  try {
    return read_dataset_csv(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<ScanPoint> load_scan(const std::filesystem::path& path) {
  try {
    return read_scan_csv(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ExtractResult run_extract(const RunConfig& config, const PhysicalConstants& constants) {
  if (config.slope) {
    ExtractResult r;
    r.moment = extract_moment(*config.slope, config.slope_sigma, config.misalignment, constants);
    return r;
  }
  if (config.input_scan) return extract_from_scan(load_scan(*config.input_scan), config, constants);
  throw ConfigError("extract needs [moment] slope or [input] scan");
}

FitOnlyResult run_fit_only(const RunConfig& config, const PhysicalConstants& constants) {
  if (!config.input_psi1 && !config.input_psi2 && !config.input_scan)
    throw ConfigError("fit-only needs at least one of [input] psi1, psi2, scan");
  FitOnlyResult r;
  if (config.input_psi1) {
    r.psi1 = load_dataset(*config.input_psi1);
    r.fit1 = try_fit(*r.psi1, config.fit);
  }
  if (config.input_psi2) {
    r.psi2 = load_dataset(*config.input_psi2);
    r.fit2 = try_fit(*r.psi2, config.fit);
  }
  if (r.fit1.ok() && r.fit2.ok())
    r.decomposition = decompose_average_difference(r.fit1.fit->params.frequency,
                                                   r.fit2.fit->params.frequency);
  if (config.input_scan)
    r.extraction = extract_from_scan(load_scan(*config.input_scan), config, constants);
  return r;
}

// ---------------------------------------------------------------------------
// Output writing

namespace {

class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, bool plot) : dir_(std::move(dir)), plot_(plot) {
    std::filesystem::create_directories(dir_);
  }

  void text(const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    files_.push_back(name);
  }
  void json(const std::string& name, const ordered_json& j) { text(name, j.dump(2) + "\n"); }

  void dataset(const std::string& stem, const ParityDataset& data, const FitOutcome& fit) {
    text(stem + ".csv", format_dataset_csv(data));
    if (data.snapshot) json(stem + ".meta.json", to_json(*data.snapshot));
    ordered_json f;
    if (fit.fit) f = to_json(*fit.fit);
    f["ok"] = fit.ok();
    if (!fit.error.empty()) f["error"] = fit.error;
    json("fit_" + stem + ".json", f);
    if (plot_) {
      std::string pts = "# tau_s parity sigma\n";
      for (const auto& r : data.records)
        pts += format_double(r.tau) + ' ' + format_double(r.parity) + ' ' +
               format_double(r.sigma) + '\n';
      text("plot_" + stem + ".dat", pts);
      if (fit.fit && !data.records.empty()) {
        double lo = data.records.front().tau, hi = lo;
        for (const auto& r : data.records) {
          lo = std::min(lo, r.tau);
          hi = std::max(hi, r.tau);
        }
        std::string model = "# tau_s model 0\n";
        constexpr int kSamples = 500;
        for (int i = 0; i <= kSamples; ++i) {
          const double t = lo + (hi - lo) * i / kSamples;
          model += format_double(t) + ' ' + format_double(damped_sinusoid(fit.fit->params, t)) +
                   " 0\n";
        }
        text("plot_" + stem + "_model.dat", model);
      }
    }
  }

  void scan(const std::string& stem, std::span<const ScanPoint> pts, const std::string& x,
            const std::string& y, const std::string& s) {
    text(stem + ".csv", format_scan_csv(pts, x, y, s));
    if (plot_) {
      std::string out = "# " + x + ' ' + y + ' ' + s + '\n';
      for (const auto& p : pts)
        out += format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(p.sigma) + '\n';
      text("plot_" + stem + ".dat", out);
    }
  }

  void finish(RunMode mode, const RunConfig& config, int exit_code) {
    RunConfig echoed = config;
    const bool has_mode = std::any_of(echoed.echo.begin(), echoed.echo.end(), [](const auto& e) {
      return e.section.empty() && e.key == "mode";
    });
    if (!has_mode) echoed.echo.insert(echoed.echo.begin(), {"", "mode", std::string(to_string(mode)), 0});
    text("config.ini", format_config_echo(echoed));

    ordered_json manifest;
    manifest["tool"] = "dfsq";
    manifest["version"] = DFSQ_VERSION;
    manifest["mode"] = std::string(to_string(mode));
    manifest["seed"] = config.seed;
    manifest["exit_code"] = exit_code;
    ordered_json cfg = ordered_json::object();
    for (const auto& e : echoed.echo) cfg[e.section.empty() ? "run" : e.section][e.key] = e.value;
    manifest["config"] = cfg;
    files_.push_back("manifest.json");
    manifest["files"] = files_;
    write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  bool plot_;
  std::vector<std::string> files_;
};

ordered_json measurement_json(const FrequencyMeasurement& m) {
  ordered_json j;
  j["ok"] = m.ok();
  j["true_rate_psi1_hz"] = m.true_rate1_hz;
  j["true_rate_psi2_hz"] = m.true_rate2_hz;
  if (m.fit1.fit) j["fit_frequency_psi1_hz"] = m.fit1.fit->params.frequency;
  if (m.fit2.fit) j["fit_frequency_psi2_hz"] = m.fit2.fit->params.frequency;
  if (!m.fit1.error.empty()) j["error_psi1"] = m.fit1.error;
  if (!m.fit2.error.empty()) j["error_psi2"] = m.fit2.error;
  if (m.ok()) {
    j["average_hz"] = m.average_hz();
    j["average_sigma_hz"] = m.average_sigma_hz();
    j["half_difference_hz"] = m.half_difference_hz();
    j["half_difference_sigma_hz"] = m.half_difference_sigma_hz();
  }
  return j;
}

std::string point_stem(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "datasets/%s%03zu", prefix, i);
  return buf;
}

ordered_json offset_json(const OffsetDecomposition& o) {
  return {{"second_order_zeeman_hz", o.second_order_zeeman}, {"stray_quadrupole_hz", o.stray_quadrupole}};
}

}  // namespace

int execute(RunMode mode, const RunConfig& config, const RunOptions& options) {
  if (config.mode && *config.mode != mode)
    throw ConfigError("config mode '" + std::string(to_string(*config.mode)) +
                      "' does not match command '" + std::string(to_string(mode)) + "'");
  const PhysicalConstants constants;
  OutputWriter out(config.output_dir, options.emit_plot_data);
  bool failed = false;

  switch (mode) {
    case RunMode::parity_scan: {
      const auto r = run_parity_scan(config, options.threads, constants);
      const auto& m = r.measurement;
      out.dataset("psi1", m.psi1, m.fit1);
      out.dataset("psi2", m.psi2, m.fit2);
      ordered_json d = measurement_json(m);
      d["model_decomposition"] = {
          {"average_hz", decompose_average_difference(m.true_rate1_hz, m.true_rate2_hz).average},
          {"half_difference_hz",
           decompose_average_difference(m.true_rate1_hz, m.true_rate2_hz).half_difference}};
      out.json("decomposition.json", d);
      failed = !m.ok();
      break;
    }
    case RunMode::angle_scan: {
      const auto r = run_angle_scan(config, options.threads, constants);
      ordered_json pts = ordered_json::array();
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        out.dataset(point_stem("angle", i) + "_psi1", r.points[i].psi1, r.points[i].fit1);
        out.dataset(point_stem("angle", i) + "_psi2", r.points[i].psi2, r.points[i].fit2);
        ordered_json p = measurement_json(r.points[i]);
        p["lab_angle_deg"] = r.lab_angles[i] / units::degree;
        pts.push_back(p);
        failed = failed || !r.points[i].ok();
      }
      out.json("angle_points.json", pts);
      std::vector<ScanPoint> deg;
      for (auto p : r.shifts) deg.push_back({p.x / units::degree, p.y, p.sigma});
      out.scan("angle_scan", deg, "angle_deg", "delta_hz", "sigma_hz");
      ordered_json f;
      if (r.fit) {
        f = to_json(*r.fit);
        f["aligned_lab_angle_deg"] = r.fit->beta0 / units::degree;
        f["shift_at_alignment_hz"] = r.fit->offset + r.fit->amplitude;
      }
      if (!r.fit_error.empty()) f["error"] = r.fit_error;
      out.json("angular_fit.json", f);
      failed = failed || !r.fit_error.empty();
      break;
    }
    case RunMode::gradient_scan: {
      const auto r = run_gradient_scan(config, options.threads, constants);
      ordered_json pts = ordered_json::array();
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        out.dataset(point_stem("gradient", i) + "_psi1", r.points[i].psi1, r.points[i].fit1);
        out.dataset(point_stem("gradient", i) + "_psi2", r.points[i].psi2, r.points[i].fit2);
        ordered_json p = measurement_json(r.points[i]);
        p["gradient_vmm2"] = r.gradients[i];
        p["ion_spacing_m"] = r.points[i].psi1.snapshot->ion_spacing;
        pts.push_back(p);
        failed = failed || !r.points[i].ok();
      }
      out.json("gradient_points.json", pts);
      out.scan("gradient_scan", r.shifts, "gradient_vmm2", "delta_hz", "sigma_hz");
      out.scan("gradient_part", r.gradient_parts, "gradient_vmm2", "delta_bprime_hz", "sigma_hz");
      if (r.linear) out.json("linear_fit.json", to_json(*r.linear));
      if (r.power_law) out.json("power_law.json", to_json(*r.power_law));
      if (r.moment) out.json("moment.json", to_json(*r.moment));
      if (r.offset) out.json("offset.json", offset_json(*r.offset));
      if (!r.fit_error.empty()) out.json("errors.json", {{"error", r.fit_error}});
      failed = failed || !r.fit_error.empty() || !r.moment;
      break;
    }
    case RunMode::extract: {
      ExtractResult r;
      try {
        r = run_extract(config, constants);
      } catch (const FitError& e) {
        out.json("errors.json", {{"error", e.what()}});
        out.finish(mode, config, kExitFitFailure);
        return kExitFitFailure;
      }
      out.json("moment.json", to_json(r.moment));
      if (r.linear) out.json("linear_fit.json", to_json(*r.linear));
      if (r.offset) out.json("offset.json", offset_json(*r.offset));
      break;
    }
    case RunMode::fit_only: {
      FitOnlyResult r;
      try {
        r = run_fit_only(config, constants);
      } catch (const FitError& e) {
        out.json("errors.json", {{"error", e.what()}});
        out.finish(mode, config, kExitFitFailure);
        return kExitFitFailure;
      }
      auto fit_report = [&](const std::string& name, const FitOutcome& f) {
        ordered_json j;
        if (f.fit) j = to_json(*f.fit);
        j["ok"] = f.ok();
        if (!f.error.empty()) j["error"] = f.error;
        out.json(name, j);
        failed = failed || !f.ok();
      };
      if (r.psi1) fit_report("fit_psi1.json", r.fit1);
      if (r.psi2) fit_report("fit_psi2.json", r.fit2);
      if (r.decomposition)
        out.json("decomposition.json", {{"average_hz", r.decomposition->average},
                                        {"half_difference_hz", r.decomposition->half_difference}});
      if (r.extraction) {
        out.json("moment.json", to_json(r.extraction->moment));
        out.json("linear_fit.json", to_json(*r.extraction->linear));
        out.json("offset.json", offset_json(*r.extraction->offset));
      }
      break;
    }
  }

  const int code = failed ? kExitFitFailure : kExitOk;
  out.finish(mode, config, code);
  return code;
}

}  // namespace dfsq
