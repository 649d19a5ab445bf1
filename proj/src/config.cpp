#include "dfsq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "dfsq/dataset_io.hpp"

namespace dfsq {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::parity_scan: return "parity-scan";
    case RunMode::angle_scan: return "angle-scan";
    case RunMode::gradient_scan: return "gradient-scan";
    case RunMode::extract: return "extract";
    case RunMode::fit_only: return "fit-only";
  }
  return "unknown";
}

std::optional<RunMode> parse_run_mode(std::string_view text) {
  for (auto m : {RunMode::parity_scan, RunMode::angle_scan, RunMode::gradient_scan,
                 RunMode::extract, RunMode::fit_only})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct UnitSpec {
  std::string_view suffix;
  double factor;
};

std::span<const UnitSpec> units_for(Dimension dim) {
  static constexpr UnitSpec frequency[] = {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};
  static constexpr UnitSpec voltage[] = {{"V", 1.0}, {"kV", 1e3}};
  static constexpr UnitSpec field[] = {{"T", 1.0}, {"G", 1e-4}, {"mG", 1e-7}};
  static constexpr UnitSpec field_gradient[] = {{"T/m", 1.0}, {"G/m", 1e-4}, {"G/cm", 1e-2}};
  static constexpr UnitSpec time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
  static constexpr UnitSpec egrad[] = {{"V/m2", 1.0}, {"Vmm2", 1e6}};
  static constexpr UnitSpec angle[] = {{"rad", 1.0}, {"deg", kPi / 180.0}};
  static constexpr UnitSpec zeeman[] = {{"Hz/T2", 1.0}, {"Hz/G2", 1e8}};
  static constexpr UnitSpec moment[] = {{"ea02", 1.0}};
  static constexpr UnitSpec slope[] = {{"Hzmm2/V", 1.0}};
  static constexpr UnitSpec rate[] = {{"1/s", 1.0}};
  switch (dim) {
    case Dimension::frequency: return frequency;
    case Dimension::voltage: return voltage;
    case Dimension::magnetic_field: return field;
    case Dimension::field_gradient: return field_gradient;
    case Dimension::time: return time;
    case Dimension::electric_gradient: return egrad;
    case Dimension::angle: return angle;
    case Dimension::zeeman_coeff: return zeeman;
    case Dimension::moment: return moment;
    case Dimension::slope: return slope;
    case Dimension::rate: return rate;
  }
  return {};
}

double parse_plain_number(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("expected a number, got '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == text.npos ? text.npos : comma - start)));
    if (comma == text.npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads typed values and records the effective text of every key it touches.
class Reader {
 public:
  explicit Reader(std::vector<ConfigEntry> entries) : entries_(std::move(entries)) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries_) {
      if (!seen.insert({e.section, e.key}).second)
        throw ConfigError("line " + std::to_string(e.line) + ": duplicate key '" + e.key +
                          "' in [" + e.section + "]");
    }
  }

  // Effective text of (section, key): explicit value, else `fallback`.
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback = {}) {
    std::string value = fallback;
    current_line_ = 0;
    for (const auto& e : entries_) {
      if (e.section == section && e.key == key) {
        value = e.value;
        current_line_ = e.line;
      }
    }
    used_.insert({section, key});
    if (!value.empty()) echo_.push_back({section, key, value, current_line_});
    return value;
  }

  // Replace the echoed text of the most recent key (used for resolved paths).
  void rewrite_last(const std::string& value) { echo_.back().value = value; }

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const {
    std::string where = current_line_ > 0 ? "line " + std::to_string(current_line_) + ": " : "";
    throw ConfigError(where + "[" + section + "] " + key + ": " + what);
  }

  template <typename Fn>
  auto guarded(const std::string& section, const std::string& key, Fn&& fn) {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail(section, key, e.what());
    } catch (const std::invalid_argument& e) {
      fail(section, key, e.what());
    }
  }

  std::optional<double> quantity(const std::string& section, const std::string& key,
                                 Dimension dim, const std::string& fallback = {}) {
    const auto t = text(section, key, fallback);
    if (t.empty()) return std::nullopt;
    return guarded(section, key, [&] { return parse_quantity(t, dim); });
  }

  std::vector<double> quantity_list(const std::string& section, const std::string& key,
                                    Dimension dim) {
    const auto t = text(section, key);
    std::vector<double> out;
    for (auto item : split_list(t))
      out.push_back(guarded(section, key, [&] { return parse_quantity(item, dim); }));
    return out;
  }

  std::optional<double> number(const std::string& section, const std::string& key,
                               const std::string& fallback = {}) {
    const auto t = text(section, key, fallback);
    if (t.empty()) return std::nullopt;
    return guarded(section, key, [&] { return parse_plain_number(t); });
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& section, const std::string& key,
                                                const std::string& fallback = {}) {
    const auto t = text(section, key, fallback);
    if (t.empty()) return std::nullopt;
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
      fail(section, key, "expected a non-negative integer, got '" + t + "'");
    return v;
  }

  std::vector<int> integer_list(const std::string& section, const std::string& key,
                                const std::string& fallback) {
    std::vector<int> out;
    for (auto item : split_list(text(section, key, fallback))) {
      int v = 0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
        fail(section, key, "expected integers, got '" + std::string(item) + "'");
      out.push_back(v);
    }
    return out;
  }

  bool boolean(const std::string& section, const std::string& key, const std::string& fallback) {
    const auto t = text(section, key, fallback);
    if (t == "true") return true;
    if (t == "false") return false;
    fail(section, key, "expected true or false, got '" + t + "'");
  }

  void reject_unknown() const {
    for (const auto& e : entries_)
      if (!used_.count({e.section, e.key}))
        throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key +
                          "' in [" + e.section + "]");
  }

  std::vector<ConfigEntry> take_echo() { return std::move(echo_); }

 private:
  std::vector<ConfigEntry> entries_;
  std::set<std::pair<std::string, std::string>> used_;
  std::vector<ConfigEntry> echo_;
  int current_line_ = 0;
};

StateConfig read_state(Reader& r, const std::string& section, const std::string& default_m) {
  StateConfig s;
  s.twice_j = static_cast<int>(*r.unsigned_integer(section, "twice_j", "5"));
  const auto m = r.integer_list(section, "twice_m", default_m);
  if (m.size() != 4) r.fail(section, "twice_m", "expected four doubled m values");
  std::copy(m.begin(), m.end(), s.twice_m.begin());
  s.phase = *r.quantity(section, "phase", Dimension::angle, "0 rad");
  s.contrast = *r.number(section, "contrast", "0.9");
  r.guarded(section, "twice_m", [&] {
    s.spec();
    return 0;
  });
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& text) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim) {
  text = trim(text);
  // Longest leading number, then the unit suffix.
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || !std::isfinite(v))
    throw ConfigError("expected '<number> <unit>', got '" + std::string(text) + "'");
  const auto suffix = trim(text.substr(static_cast<std::size_t>(res.ptr - text.data())));
  std::string allowed;
  for (const auto& u : units_for(dim)) {
    if (u.suffix == suffix) return v * u.factor;
    allowed += (allowed.empty() ? "" : ", ") + std::string(u.suffix);
  }
  if (suffix.empty())
    throw ConfigError("missing unit in '" + std::string(text) + "' (allowed: " + allowed + ")");
  throw ConfigError("unit '" + std::string(suffix) + "' not allowed here (allowed: " + allowed +
                    ")");
}

std::vector<ConfigEntry> parse_config_text(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::string section;
  std::string_view rest(text);
  int line_no = 0;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == line.npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    entries.push_back({section, std::string(key), std::string(value), line_no});
  }
  return entries;
}

BellStateSpec StateConfig::spec() const {
  return BellStateSpec::in_manifold(twice_j, twice_m[0], twice_m[1], twice_m[2], twice_m[3], phase,
                                    contrast);
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  Reader r(parse_config_text(text));
  RunConfig c;

  if (const auto mode = r.text("", "mode"); !mode.empty()) {
    c.mode = parse_run_mode(mode);
    if (!c.mode) r.fail("", "mode", "unknown mode '" + mode + "'");
  }
  c.output_dir = r.text("", "output_dir", "dfsq_out");
  c.seed = *r.unsigned_integer("", "seed", "1");

  // [trap]
  const auto cal_v = r.quantity("trap", "calibration_voltage", Dimension::voltage);
  const auto cal_f = r.quantity("trap", "calibration_frequency", Dimension::frequency);
  if (cal_v.has_value() != cal_f.has_value())
    r.fail("trap", "calibration_frequency", "calibration needs both voltage and frequency");
  if (cal_v) {
    if (!(*cal_v > 0.0) || !(*cal_f > 0.0))
      r.fail("trap", "calibration_voltage", "calibration point must be positive");
    c.calibration = TrapCalibration::from_reference(*cal_v, kTwoPi * *cal_f);
  }
  c.tip_voltage = r.quantity("trap", "tip_voltage", Dimension::voltage);
  c.gradient = r.quantity("trap", "gradient", Dimension::electric_gradient);
  c.tip_voltages = r.quantity_list("trap", "tip_voltages", Dimension::voltage);
  c.gradients = r.quantity_list("trap", "gradients", Dimension::electric_gradient);
  c.stray_gradient = *r.quantity("trap", "stray_gradient", Dimension::electric_gradient, "0 Vmm2");
  auto check_nonneg = [&](const std::string& key, double v) {
    if (v < 0.0) r.fail("trap", key, "must be >= 0");
  };
  if (c.tip_voltage) check_nonneg("tip_voltage", *c.tip_voltage);
  if (c.gradient) check_nonneg("gradient", *c.gradient);
  for (double v : c.tip_voltages) check_nonneg("tip_voltages", v);
  for (double g : c.gradients)
    if (!(g > 0.0)) r.fail("trap", "gradients", "gradient magnitudes must be > 0");
  if (c.tip_voltage && c.gradient) r.fail("trap", "gradient", "give tip_voltage or gradient, not both");
  if (!c.tip_voltages.empty() && !c.gradients.empty())
    r.fail("trap", "gradients", "give tip_voltages or gradients, not both");
  if ((c.tip_voltage || !c.tip_voltages.empty()) && !c.calibration)
    r.fail("trap", "calibration_voltage", "tip voltages need a calibration point");

  // [geometry]
  c.geometry.beta = *r.quantity("geometry", "beta", Dimension::angle, "0 deg");
  c.geometry.epsilon = *r.number("geometry", "epsilon", "0");
  c.geometry.alpha = *r.quantity("geometry", "alpha", Dimension::angle, "0 deg");
  r.guarded("geometry", "epsilon", [&] {
    c.geometry.validate();
    return 0;
  });
  c.beta_offset = *r.quantity("geometry", "beta_offset", Dimension::angle, "0 deg");
  c.angle_start = *r.quantity("geometry", "angle_start", Dimension::angle, "-20 deg");
  c.angle_stop = *r.quantity("geometry", "angle_stop", Dimension::angle, "75 deg");
  c.angle_points = *r.unsigned_integer("geometry", "angle_points", "20");
  c.misalignment = *r.quantity("geometry", "misalignment", Dimension::angle, "3 deg");
  if (c.misalignment < 0.0) r.fail("geometry", "misalignment", "must be >= 0");

  // [magnetic]
  c.magnetic.bias_field = *r.quantity("magnetic", "bias_field", Dimension::magnetic_field, "2.9 G");
  c.magnetic.axial_gradient =
      *r.quantity("magnetic", "axial_gradient", Dimension::field_gradient, "0 G/m");
  c.magnetic.second_order_coeff =
      *r.quantity("magnetic", "second_order_coeff", Dimension::zeeman_coeff, "-0.3448 Hz/G2");
  c.plan.noise.field_noise_rms =
      *r.quantity("magnetic", "noise_rms", Dimension::magnetic_field, "0 mG");
  r.guarded("magnetic", "bias_field", [&] {
    c.magnetic.validate();
    return 0;
  });
  if (c.plan.noise.field_noise_rms < 0.0) r.fail("magnetic", "noise_rms", "must be >= 0");

  // [psi1], [psi2]
  c.psi1 = read_state(r, "psi1", "-5, 3, -1, -1");
  c.psi2 = read_state(r, "psi2", "3, -5, -1, -1");

  // [plan]
  const auto explicit_times = r.quantity_list("plan", "wait_times", Dimension::time);
  const double start = *r.quantity("plan", "wait_start", Dimension::time, "0 ms");
  const double stop = *r.quantity("plan", "wait_stop", Dimension::time, "300 ms");
  const auto points = *r.unsigned_integer("plan", "points", "60");
  const double gap_start = *r.quantity("plan", "gap_start", Dimension::time, "160 ms");
  const double gap_stop = *r.quantity("plan", "gap_stop", Dimension::time, "180 ms");
  if (!explicit_times.empty()) {
    c.plan.wait_times = explicit_times;
  } else {
    c.plan.wait_times = r.guarded("plan", "wait_stop", [&] {
      return wait_schedule(start, stop, points, gap_start, gap_stop);
    });
  }
  const auto shots = *r.unsigned_integer("plan", "shots", "100");
  if (shots < 1 || shots > 0xFFFFFFFFull) r.fail("plan", "shots", "must be in [1, 2^32)");
  c.plan.shots = static_cast<std::uint32_t>(shots);
  c.plan.noise.d_state_lifetime = *r.quantity("plan", "lifetime", Dimension::time, "1.168 s");
  c.plan.noise.extra_dephasing_rate =
      *r.quantity("plan", "extra_dephasing_rate", Dimension::rate, "0 1/s");
  c.plan.noiseless = r.boolean("plan", "noiseless", "false");
  r.guarded("plan", "wait_times", [&] {
    c.plan.validate();
    return 0;
  });

  // [moment]
  c.theta_true = *r.quantity("moment", "theta_true", Dimension::moment, "1.917 ea02");
  c.slope = r.quantity("moment", "slope", Dimension::slope);
  c.slope_sigma = *r.quantity("moment", "slope_sigma", Dimension::slope, "0 Hzmm2/V");
  if (c.slope_sigma < 0.0) r.fail("moment", "slope_sigma", "must be >= 0");

  // [fit]
  c.fit.freq_min = *r.quantity("fit", "freq_min", Dimension::frequency, "0 Hz");
  c.fit.freq_max = *r.quantity("fit", "freq_max", Dimension::frequency, "0 Hz");
  c.fit.grid_resolution = *r.number("fit", "grid_resolution", "0.125");
  c.fit.max_iterations = static_cast<int>(*r.unsigned_integer("fit", "max_iterations", "200"));
  r.guarded("fit", "grid_resolution", [&] {
    c.fit.validate();
    return 0;
  });

  // [input]
  for (auto [key, slot] : {std::pair{"psi1", &c.input_psi1}, std::pair{"psi2", &c.input_psi2},
                           std::pair{"scan", &c.input_scan}}) {
    const auto t = r.text("input", key);
    if (t.empty()) continue;
    *slot = resolve(base_dir, t);
    r.rewrite_last(slot->value().string());
  }

  r.reject_unknown();
  c.echo = r.take_echo();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_run_config(text, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

TrapEnvironment RunConfig::operating_point(const PhysicalConstants& constants) const {
  if (tip_voltage) return TrapEnvironment::from_voltage(*tip_voltage, *calibration, stray_gradient);
  if (gradient) return TrapEnvironment::from_gradient(*gradient, constants, stray_gradient);
  throw ConfigError("[trap] needs tip_voltage or gradient for this mode");
}

std::vector<TrapEnvironment> RunConfig::scan_points(const PhysicalConstants& constants) const {
  std::vector<TrapEnvironment> out;
  for (double u : tip_voltages)
    out.push_back(TrapEnvironment::from_voltage(u, *calibration, stray_gradient));
  for (double g : gradients)
    out.push_back(TrapEnvironment::from_gradient(g, constants, stray_gradient));
  return out;
}

std::vector<double> RunConfig::scan_gradients(const PhysicalConstants& constants) const {
  if (!gradients.empty()) return gradients;
  std::vector<double> out;
  for (const auto& t : scan_points(constants)) out.push_back(std::abs(t.tip_gradient(constants)));
  return out;
}

std::vector<double> RunConfig::angle_schedule() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < angle_points; ++i) {
    const double f = angle_points == 1 ? 0.0 : static_cast<double>(i) / (angle_points - 1);
    out.push_back(angle_start + f * (angle_stop - angle_start));
  }
  return out;
}

void RunConfig::override_seed(std::uint64_t new_seed) {
  seed = new_seed;
  for (auto& e : echo)
    if (e.section.empty() && e.key == "seed") e.value = std::to_string(new_seed);
}

void RunConfig::override_output_dir(const std::filesystem::path& dir) {
  output_dir = dir;
  for (auto& e : echo)
    if (e.section.empty() && e.key == "output_dir") e.value = dir.string();
}

std::string format_config_echo(const RunConfig& config) {
  std::string out;
  std::string section;
  bool first = true;
  // Entries are grouped by section in reading order.
  for (const auto& e : config.echo) {
    if (first || e.section != section) {
      if (!e.section.empty()) out += (first ? "" : "\n") + std::string("[") + e.section + "]\n";
      section = e.section;
      first = false;
    }
    out += e.key + " = " + e.value + "\n";
  }
  return out;
}

}  // namespace dfsq
