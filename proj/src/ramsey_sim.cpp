#include "dfsq/ramsey_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "dfsq/parallel.hpp"
#include "dfsq/rng.hpp"

namespace dfsq {

void NoiseModel::validate() const {
  if (!(d_state_lifetime > 0.0)) throw std::invalid_argument("NoiseModel: lifetime must be > 0");
  if (!(field_noise_rms >= 0.0)) throw std::invalid_argument("NoiseModel: field noise must be >= 0");
  if (!(extra_dephasing_rate >= 0.0))
    throw std::invalid_argument("NoiseModel: extra dephasing rate must be >= 0");
}

void ExperimentPlan::validate() const {
  if (shots < 1) throw std::invalid_argument("ExperimentPlan: shots must be >= 1");
  for (double t : wait_times)
    if (!std::isfinite(t) || t < 0.0)
      throw std::invalid_argument("ExperimentPlan: wait times must be finite and >= 0");
  noise.validate();
}

double parity_sigma(double parity, std::uint32_t shots) {
  const double var = std::max(0.0, 1.0 - parity * parity) / static_cast<double>(shots);
  return std::sqrt(var);
}

namespace {
// Contrast left after decay and extra dephasing, before the field-noise envelope.
double decay_envelope(const BellStateSpec& spec, double tau, const NoiseModel& noise) {
  return spec.contrast * std::exp(-2.0 * tau / noise.d_state_lifetime) *
         std::exp(-noise.extra_dephasing_rate * tau);
}
}  // namespace

double parity_expectation(const BellStateSpec& spec, double rate, double tau,
                          const NoiseModel& noise, const PhysicalConstants& constants) {
  const double dephase = field_sensitivity(spec, constants) * noise.field_noise_rms * tau;
  return decay_envelope(spec, tau, noise) * std::exp(-0.5 * dephase * dephase) *
         std::cos(rate * tau + spec.phase0);
}

PointEstimate sample_point(double expectation, std::uint32_t shots, PointStream stream) {
  if (!(std::abs(expectation) <= 1.0))
    throw std::invalid_argument("sample_point: |expectation| must be <= 1");
  if (shots < 1) throw std::invalid_argument("sample_point: shots must be >= 1");
  const double p_even = 0.5 * (1.0 + expectation);
  std::uint32_t even = 0;
  for (std::uint32_t s = 0; s < shots; ++s) {
    Substream rng(stream.seed, Substream::id(stream.point, s));
    if (rng.bernoulli(p_even)) ++even;
  }
  const double estimate = 2.0 * even / static_cast<double>(shots) - 1.0;
  return {estimate, parity_sigma(estimate, shots)};
}

namespace {
// One quasi-static field offset per shot; the shot's parity is then +-1.
PointEstimate sample_point_field_noise(const BellStateSpec& spec, double rate, double tau,
                                       double sensitivity, const ExperimentPlan& plan,
                                       PointStream stream) {
  const double envelope = decay_envelope(spec, tau, plan.noise);
  std::uint32_t even = 0;
  for (std::uint32_t s = 0; s < plan.shots; ++s) {
    Substream rng(stream.seed, Substream::id(stream.point, s));
    const double offset = plan.noise.field_noise_rms * rng.normal();
    const double p = envelope * std::cos((rate + sensitivity * offset) * tau + spec.phase0);
    if (rng.bernoulli(0.5 * (1.0 + p))) ++even;
  }
  const double estimate = 2.0 * even / static_cast<double>(plan.shots) - 1.0;
  return {estimate, parity_sigma(estimate, plan.shots)};
}
}  // namespace

ParityDataset run_plan(const ExperimentPlan& plan, const BellStateSpec& spec,
                       const TrapEnvironment& trap, const MagneticEnvironment& magnetic,
                       const FieldGeometry& geometry, double theta,
                       const PhysicalConstants& constants) {
  plan.validate();
  magnetic.validate();
  geometry.validate();
  spec.validate();

  SimulationSnapshot snap;
  snap.seed = plan.seed;
  snap.noiseless = plan.noiseless;
  snap.state = spec;
  snap.trap = trap;
  snap.magnetic = magnetic;
  snap.geometry = geometry;
  snap.noise = plan.noise;
  snap.theta = theta;
  snap.ion_spacing = trap.separation(constants);
  snap.budget = phase_rate(spec, trap, magnetic, geometry, theta, snap.ion_spacing, constants);

  const double rate = snap.budget.total;
  const double sensitivity = field_sensitivity(spec, constants);
  const bool field_noise = sensitivity != 0.0 && plan.noise.field_noise_rms > 0.0;

  ParityDataset data;
  data.records.resize(plan.wait_times.size());
  parallel_for(plan.wait_times.size(), plan.threads, [&](std::size_t i) {
    const double tau = plan.wait_times[i];
    const PointStream stream{plan.seed, static_cast<std::uint32_t>(i)};
    PointEstimate est;
    if (plan.noiseless) {
      const double p = parity_expectation(spec, rate, tau, plan.noise, constants);
      est = {p, parity_sigma(p, plan.shots)};
    } else if (field_noise) {
      est = sample_point_field_noise(spec, rate, tau, sensitivity, plan, stream);
    } else {
      est = sample_point(parity_expectation(spec, rate, tau, plan.noise, constants), plan.shots,
                         stream);
    }
    data.records[i] = ParityRecord{tau, est.parity, est.sigma, plan.shots};
  });
  data.snapshot = snap;
  return data;
}

std::vector<double> wait_schedule(double start, double stop, std::size_t points,
                                  double gap_begin, double gap_end) {
  if (!(stop >= start)) throw std::invalid_argument("wait_schedule: stop < start");
  std::vector<double> times;
  if (points == 0) return times;
  const bool has_gap = gap_end > gap_begin && gap_begin > start && gap_end < stop;
  const double gap = has_gap ? gap_end - gap_begin : 0.0;
  const double usable = (stop - start) - gap;
  times.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : usable * static_cast<double>(i) / (points - 1);
    double t = start + s;
    if (has_gap && t > gap_begin) t += gap;
    times.push_back(t);
  }
  return times;
}

}  // namespace dfsq
