#include <cmath>
#include <cstring>

#include "doctest.h"
#include "dfsq/ramsey_sim.hpp"
#include "dfsq/rng.hpp"

using namespace dfsq;

namespace {
const PhysicalConstants kC;
const double kTheta = 1.917 * kC.quadrupole_unit();

bool same_bytes(const ParityDataset& a, const ParityDataset& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (std::memcmp(&x.tau, &y.tau, sizeof(double)) || std::memcmp(&x.parity, &y.parity, sizeof(double)) ||
        std::memcmp(&x.sigma, &y.sigma, sizeof(double)) || x.shots != y.shots)
      return false;
  }
  return true;
}
}  // namespace

TEST_CASE("parity expectation") {
  const NoiseModel noise;
  const auto s = psi1_state(0.9, 0.4);
  CHECK(parity_expectation(s, 123.0, 0.0, noise, kC) == doctest::Approx(0.9 * std::cos(0.4)));

  const auto unit = psi1_state(1.0);
  const double lam = 2.0 * M_PI * 33.35;
  CHECK(parity_expectation(unit, lam, 0.584, noise, kC) ==
        doctest::Approx(std::exp(-1.0) * std::cos(lam * 0.584)).epsilon(1e-12));

  NoiseModel extra = noise;
  extra.extra_dephasing_rate = 2.0;
  CHECK(parity_expectation(unit, 0.0, 0.1, extra, kC) ==
        doctest::Approx(std::exp(-0.2 / 1.168 - 0.2)).epsilon(1e-14));
}

TEST_CASE("DFS expectation ignores field noise") {
  NoiseModel quiet, loud;
  loud.field_noise_rms = 1.0 * units::gauss;
  for (const auto& s : {psi1_state(0.9), psi2_state(0.9)})
    for (double tau : {0.0, 0.01, 0.17, 0.3})
      CHECK(parity_expectation(s, 200.0, tau, quiet, kC) ==
            parity_expectation(s, 200.0, tau, loud, kC));
}

TEST_CASE("envelope bounds the expectation") {
  NoiseModel noise;
  noise.field_noise_rms = 3.0 * units::milligauss;
  const auto non_dfs = BellStateSpec::in_manifold(5, -5, 1, -1, 1, 0.3, 0.9);
  for (int i = 0; i <= 300; ++i) {
    const double tau = i * 1e-3;
    const double bound = 0.9 * std::exp(-2.0 * tau / noise.d_state_lifetime);
    for (const auto& s : {psi1_state(0.9, 0.3), non_dfs})
      CHECK(std::abs(parity_expectation(s, 2.0 * M_PI * 33.35, tau, noise, kC)) <= bound + 1e-15);
  }
}

TEST_CASE("sample_point statistics") {
  const auto one = sample_point(1.0, 100, {1, 0});
  CHECK(one.parity == 1.0);
  CHECK(one.sigma == 0.0);
  CHECK(sample_point(-1.0, 50, {1, 0}).parity == -1.0);
  CHECK_THROWS_AS(sample_point(1.01, 10, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(sample_point(0.0, 0, {1, 0}), std::invalid_argument);

  const int reps = 10000;
  const std::uint32_t n = 100;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto e = sample_point(0.0, n, {derive_seed(99, r), 0});
    CHECK(e.sigma == doctest::Approx(std::sqrt((1 - e.parity * e.parity) / n)));
    s1 += e.parity;
    s2 += e.parity * e.parity;
  }
  const double mean = s1 / reps;
  const double sd = std::sqrt(s2 / reps - mean * mean);
  const double expected = 1.0 / std::sqrt(double(n));
  CHECK(std::abs(mean) < 3.0 * expected / std::sqrt(double(reps)));
  CHECK(std::abs(sd - expected) < 3.0 * expected / std::sqrt(2.0 * reps));

  const auto a = sample_point(0.3, 64, {5, 9});
  const auto b = sample_point(0.3, 64, {5, 9});
  CHECK(a.parity == b.parity);
}

TEST_CASE("run_plan basics") {
  const auto trap = TrapEnvironment::from_gradient(17.7e6, kC);
  ExperimentPlan plan;
  plan.seed = 3;
  CHECK(run_plan(plan, psi1_state(0.9), trap, {}, {}, kTheta, kC).records.empty());

  plan.wait_times = {0.05};
  plan.shots = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    plan.seed = seed;
    const double p = run_plan(plan, psi1_state(0.9), trap, {}, {}, kTheta, kC).records[0].parity;
    CHECK((p == 1.0 || p == -1.0));
  }

  plan.wait_times = {-1.0};
  CHECK_THROWS_AS(run_plan(plan, psi1_state(0.9), trap, {}, {}, kTheta, kC), std::invalid_argument);
  plan.wait_times = {0.1};
  plan.shots = 0;
  CHECK_THROWS_AS(run_plan(plan, psi1_state(0.9), trap, {}, {}, kTheta, kC), std::invalid_argument);
}

TEST_CASE("run_plan records a snapshot and follows plan order") {
  const auto trap = TrapEnvironment::from_gradient(17.7e6, kC);
  ExperimentPlan plan;
  plan.wait_times = {0.3, 0.0, 0.12};
  plan.noiseless = true;
  const auto data = run_plan(plan, psi1_state(0.9), trap, {2.9e-4, 0.0, 0.0}, {}, kTheta, kC);
  REQUIRE(data.snapshot.has_value());
  const double rate = data.snapshot->budget.total;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(data.records[i].tau == plan.wait_times[i]);
    CHECK(data.records[i].parity ==
          parity_expectation(psi1_state(0.9), rate, plan.wait_times[i], plan.noise, kC));
  }
  CHECK(data.snapshot->ion_spacing == trap.separation(kC));
}

TEST_CASE("run_plan is deterministic across thread counts") {
  const auto trap = TrapEnvironment::from_gradient(17.7e6, kC);
  ExperimentPlan plan;
  plan.wait_times = wait_schedule(0.0, 0.3, 60, 0.16, 0.18);
  plan.seed = 77;
  plan.noise.field_noise_rms = 1.0 * units::milligauss;
  const auto non_dfs = BellStateSpec::in_manifold(5, -5, 1, -1, 1, 0.0, 0.9);
  for (const auto& s : {psi1_state(0.9), non_dfs}) {
    plan.threads = 1;
    const auto a = run_plan(plan, s, trap, {2.9e-4, 0.0, 0.0}, {}, kTheta, kC);
    for (unsigned t : {2u, 4u, 0u}) {
      plan.threads = t;
      CHECK(same_bytes(a, run_plan(plan, s, trap, {2.9e-4, 0.0, 0.0}, {}, kTheta, kC)));
    }
    plan.threads = 1;
    plan.seed = 78;
    CHECK_FALSE(same_bytes(a, run_plan(plan, s, trap, {2.9e-4, 0.0, 0.0}, {}, kTheta, kC)));
    plan.seed = 77;
  }
}

TEST_CASE("quasi-static field noise dephases a non-DFS state") {
  // ion 2 stays in -1/2, ion 1 carries the -5/2 vs -1/2 superposition
  const auto spec = BellStateSpec::in_manifold(5, -5, -1, -1, -1, 0.0, 1.0);
  const double sigma_b = 3.0 * units::milligauss;
  const double lambda_b = 0.5 * (-5 + 1) * kC.lande_g_D52 * kC.bohr_magneton / kC.hbar;
  CHECK(field_sensitivity(spec, kC) == doctest::Approx(lambda_b).epsilon(1e-14));

  // Gaussian envelope reaches 1/e at sqrt(2) / (lambda_B sigma_B).
  const double t_1e = std::sqrt(2.0) / std::abs(lambda_b * sigma_b);
  NoiseModel noise;
  noise.field_noise_rms = sigma_b;
  const double decay = std::exp(-2.0 * t_1e / noise.d_state_lifetime);
  CHECK(std::abs(std::exp(-0.5 * std::pow(lambda_b * sigma_b * t_1e, 2)) - std::exp(-1.0)) < 1e-14);

  const auto trap = TrapEnvironment::from_gradient(17.7e6, kC);
  const double rate = phase_rate(spec, trap, {}, {}, kTheta, trap.separation(kC), kC).total;
  auto contrast_at = [&](double tau) {
    // cancel the deterministic phase so the measured parity is the contrast
    auto s = spec;
    s.phase0 = -rate * tau;
    ExperimentPlan plan;
    plan.wait_times = {tau};
    plan.shots = 10000;
    plan.seed = 5;
    plan.noise = noise;
    const double truth = std::exp(-2.0 * tau / noise.d_state_lifetime) *
                         std::exp(-0.5 * std::pow(lambda_b * sigma_b * tau, 2));
    CHECK(parity_expectation(s, rate, tau, noise, kC) == doctest::Approx(truth).epsilon(1e-9));
    return run_plan(plan, s, trap, {}, {}, kTheta, kC).records[0].parity /
           std::exp(-2.0 * tau / noise.d_state_lifetime);
  };
  // first 1/e crossing of the simulated contrast, linearly interpolated
  double prev_t = 0.0, prev_c = 1.0, crossing = NAN;
  for (int i = 1; i <= 40 && std::isnan(crossing); ++i) {
    const double t = 0.05 * i * t_1e;
    const double c = contrast_at(t);
    if (c < std::exp(-1.0))
      crossing = prev_t + (prev_c - std::exp(-1.0)) / (prev_c - c) * (t - prev_t);
    prev_t = t;
    prev_c = c;
  }
  REQUIRE(std::isfinite(crossing));
  CHECK(std::abs(crossing / t_1e - 1.0) < 0.1);
  CHECK(decay > 0.99);
}

TEST_CASE("wait schedule skips the gap") {
  const auto t = wait_schedule(0.0, 0.3, 60, 0.16, 0.18);
  REQUIRE(t.size() == 60);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(0.3));
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK_FALSE((t[i] > 0.16 && t[i] < 0.18));
    if (i) CHECK(t[i] > t[i - 1]);
  }
  CHECK(wait_schedule(0.0, 1.0, 0).empty());
  CHECK(wait_schedule(0.2, 1.0, 1) == std::vector<double>{0.2});
  CHECK_THROWS_AS(wait_schedule(1.0, 0.0, 5), std::invalid_argument);
}
