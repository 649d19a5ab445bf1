#include "dfsq/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dfsq {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
    throw DatasetFormatError("line " + std::to_string(line_no) + ": bad number '" +
                             std::string(field) + "'");
  return v;
}

// Data lines of a CSV with the given header; blank lines and '#' comments skipped.
std::vector<std::vector<std::string_view>> csv_rows(const std::string& text,
                                                    std::span<const std::string_view> header,
                                                    std::vector<std::size_t>& line_numbers) {
  std::vector<std::vector<std::string_view>> rows;
  std::string_view rest(text);
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const auto line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    if (!seen_header) {
      if (!header.empty()) {
        if (fields.size() != header.size())
          throw DatasetFormatError("header must have " + std::to_string(header.size()) + " columns");
        for (std::size_t i = 0; i < header.size(); ++i)
          if (fields[i] != header[i])
            throw DatasetFormatError("unexpected column '" + std::string(fields[i]) +
                                     "', expected '" + std::string(header[i]) + "'");
      }
      seen_header = true;
      continue;
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (!seen_header) throw DatasetFormatError("missing header line");
  return rows;
}

}  // namespace

std::string format_dataset_csv(const ParityDataset& data) {
  std::string out = "tau_s,parity,sigma,shots\n";
  for (const auto& r : data.records) {
    out += format_double(r.tau) + ',' + format_double(r.parity) + ',' + format_double(r.sigma) +
           ',' + std::to_string(r.shots) + '\n';
  }
  return out;
}

ParityDataset parse_dataset_csv(const std::string& text) {
  static constexpr std::string_view kHeader[] = {"tau_s", "parity", "sigma", "shots"};
  std::vector<std::size_t> lines;
  const auto rows = csv_rows(text, kHeader, lines);
  ParityDataset data;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const auto ln = lines[i];
    if (f.size() != 4) throw DatasetFormatError("line " + std::to_string(ln) + ": expected 4 fields");
    ParityRecord r;
    r.tau = parse_number(f[0], ln);
    r.parity = parse_number(f[1], ln);
    r.sigma = parse_number(f[2], ln);
    const double shots = parse_number(f[3], ln);
    if (r.tau < 0.0) throw DatasetFormatError("line " + std::to_string(ln) + ": negative tau");
    if (std::abs(r.parity) > 1.0)
      throw DatasetFormatError("line " + std::to_string(ln) + ": |parity| > 1");
    if (r.sigma < 0.0) throw DatasetFormatError("line " + std::to_string(ln) + ": negative sigma");
    if (shots < 1.0 || shots != std::floor(shots) || shots > 4294967295.0)
      throw DatasetFormatError("line " + std::to_string(ln) + ": shots must be a positive integer");
    r.shots = static_cast<std::uint32_t>(shots);
    data.records.push_back(r);
  }
  return data;
}

ParityDataset read_dataset_csv(const std::filesystem::path& path) {
  try {
    return parse_dataset_csv(read_text(path));
  } catch (const DatasetFormatError& e) {
    throw DatasetFormatError(path.string() + ": " + e.what());
  }
}

std::string format_scan_csv(std::span<const ScanPoint> points, const std::string& x_name,
                            const std::string& y_name, const std::string& sigma_name) {
  std::string out = x_name + ',' + y_name + ',' + sigma_name + '\n';
  for (const auto& p : points)
    out += format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.sigma) + '\n';
  return out;
}

std::vector<ScanPoint> parse_scan_csv(const std::string& text) {
  std::vector<std::size_t> lines;
  const auto rows = csv_rows(text, {}, lines);
  std::vector<ScanPoint> pts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() < 3)
      throw DatasetFormatError("line " + std::to_string(lines[i]) + ": expected 3 fields");
    ScanPoint p{parse_number(rows[i][0], lines[i]), parse_number(rows[i][1], lines[i]),
                parse_number(rows[i][2], lines[i])};
    if (!(p.sigma > 0.0))
      throw DatasetFormatError("line " + std::to_string(lines[i]) + ": sigma must be > 0");
    pts.push_back(p);
  }
  return pts;
}

std::vector<ScanPoint> read_scan_csv(const std::filesystem::path& path) {
  try {
    return parse_scan_csv(read_text(path));
  } catch (const DatasetFormatError& e) {
    throw DatasetFormatError(path.string() + ": " + e.what());
  }
}

ordered_json to_json(const SimulationSnapshot& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["noiseless"] = s.noiseless;
  j["state"] = {{"twice_j", s.state.m1.twice_j()},
                {"twice_m", {s.state.m1.twice_m(), s.state.m2.twice_m(), s.state.m3.twice_m(),
                             s.state.m4.twice_m()}},
                {"phase_rad", s.state.phase0},
                {"contrast", s.state.contrast}};
  j["trap"] = {{"omega_z_rad_s", s.trap.omega_z}, {"stray_gradient_V_m2", s.trap.stray_gradient}};
  if (s.trap.tip_voltage) j["trap"]["tip_voltage_V"] = *s.trap.tip_voltage;
  j["magnetic"] = {{"bias_field_T", s.magnetic.bias_field},
                   {"axial_gradient_T_m", s.magnetic.axial_gradient},
                   {"second_order_coeff_Hz_T2", s.magnetic.second_order_coeff}};
  j["geometry"] = {{"beta_rad", s.geometry.beta},
                   {"epsilon", s.geometry.epsilon},
                   {"alpha_rad", s.geometry.alpha}};
  j["noise"] = {{"d_state_lifetime_s", s.noise.d_state_lifetime},
                {"field_noise_rms_T", s.noise.field_noise_rms},
                {"extra_dephasing_rate_1_s", s.noise.extra_dephasing_rate}};
  j["theta_C_m2"] = s.theta;
  j["ion_spacing_m"] = s.ion_spacing;
  j["rate_rad_s"] = {{"quadrupole", s.budget.quadrupole},
                     {"zeeman_uniform", s.budget.zeeman_uniform},
                     {"zeeman_gradient", s.budget.zeeman_gradient},
                     {"zeeman_second_order", s.budget.zeeman_second_order},
                     {"total", s.budget.total}};
  return j;
}

namespace {
template <typename Matrix>
ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}
}  // namespace

ordered_json to_json(const DampedSinusoidFit& f) {
  ordered_json j;
  j["status"] = std::string(to_string(f.status));
  j["zero_contrast"] = f.zero_contrast;
  j["parameters"] = {{"contrast", f.params.contrast},
                     {"frequency_hz", f.params.frequency},
                     {"phase_rad", f.params.phase},
                     {"damping_time_s", f.params.damping_time},
                     {"baseline", f.params.baseline}};
  j["errors"] = {{"contrast", f.error(kContrast)},
                 {"frequency_hz", f.error(kFrequency)},
                 {"phase_rad", f.error(kPhase)},
                 {"damping_time_s", f.error(kDampingTime)},
                 {"baseline", f.error(kBaseline)}};
  j["covariance"] = matrix_json(f.covariance);
  j["chi2"] = f.chi2;
  j["dof"] = f.dof;
  j["iterations"] = f.iterations;
  j["config"] = {{"freq_min_hz", f.config.freq_min},
                 {"freq_max_hz", f.config.freq_max},
                 {"grid_resolution", f.config.grid_resolution},
                 {"max_iterations", f.config.max_iterations},
                 {"relative_cost_tolerance", f.config.relative_cost_tolerance},
                 {"step_tolerance", f.config.step_tolerance},
                 {"contrast_max", f.config.contrast_max},
                 {"damping_min_s", f.config.damping_min},
                 {"damping_max_s", f.config.damping_max}};
  return j;
}

ordered_json to_json(const LinearFit& f) {
  ordered_json j;
  j["slope"] = f.slope;
  j["slope_error"] = f.slope_error();
  j["intercept"] = f.intercept;
  j["intercept_error"] = f.intercept_error();
  j["covariance"] = matrix_json(f.covariance);
  j["chi2"] = f.chi2;
  j["dof"] = f.dof;
  return j;
}

ordered_json to_json(const PowerLawFit& f) {
  ordered_json j;
  j["exponent"] = f.exponent;
  j["exponent_error"] = f.exponent_error;
  j["prefactor"] = f.prefactor;
  j["log_fit"] = to_json(f.log_fit);
  return j;
}

ordered_json to_json(const AngularFit& f) {
  ordered_json j;
  j["status"] = std::string(to_string(f.status));
  j["degenerate_amplitude"] = f.degenerate_amplitude;
  j["offset_hz"] = f.offset;
  j["amplitude_hz"] = f.amplitude;
  j["beta0_rad"] = f.beta0;
  j["beta0_deg"] = f.beta0 / units::degree;
  j["beta0_error_deg"] = f.beta0_error() / units::degree;
  j["covariance"] = matrix_json(f.covariance);
  j["chi2"] = f.chi2;
  j["dof"] = f.dof;
  return j;
}

ordered_json to_json(const MomentResult& m) {
  ordered_json j;
  j["theta_ea02"] = m.theta;
  j["stat_sigma_ea02"] = m.stat_sigma;
  j["syst_sigma_ea02"] = m.syst_sigma;
  j["total_sigma_ea02"] = m.total_sigma();
  j["slope_hz_mm2_per_v"] = m.slope_used;
  j["delta_beta_deg"] = m.delta_beta_assumed / units::degree;
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace dfsq
