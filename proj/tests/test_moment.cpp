#include <cmath>
#include <vector>

#include "doctest.h"
#include "dfsq/dfs_states.hpp"
#include "dfsq/linear_fit.hpp"
#include "dfsq/moment.hpp"

using namespace dfsq;

namespace {
const PhysicalConstants kC;
}

TEST_CASE("slope to moment conversion") {
  const double deg3 = 3.0 * units::degree;
  const auto r = extract_moment(2.975, 0.002, deg3, kC);
  CHECK(std::abs(r.theta - 1.83) < 0.005);
  // hand conversion: (5/12) h a / (e a0^2)
  const double e = 1.602176634e-19, a0 = 5.29177210903e-11, h = 6.62607015e-34;
  CHECK(r.theta == doctest::Approx(5.0 / 12.0 * h * 2.975e-6 / (e * a0 * a0)).epsilon(1e-9));
  CHECK(std::round(r.total_sigma() * 100.0) / 100.0 == doctest::Approx(0.01));
  CHECK(r.slope_used == 2.975);
  CHECK(r.delta_beta_assumed == deg3);
  CHECK(r.stat_sigma == doctest::Approx(r.theta * 0.002 / 2.975));
}

TEST_CASE("misalignment systematic") {
  const double d = 3.0 * units::degree;
  const auto r = extract_moment(2.975, 0.0, d, kC);
  const double exact = 1.0 - (3.0 * std::cos(d) * std::cos(d) - 1.0) / 2.0;
  CHECK(r.syst_sigma / r.theta == doctest::Approx(exact).epsilon(1e-12));
  CHECK(r.syst_sigma / r.theta == doctest::Approx(1.5 * d * d).epsilon(2e-3));
  CHECK(r.syst_sigma / r.theta == doctest::Approx(0.0041).epsilon(0.01));
  CHECK(extract_moment(2.975, 0.0, 0.0, kC).syst_sigma == 0.0);
}

TEST_CASE("trivial and invalid inputs") {
  const auto z = extract_moment(0.0, 0.0, 0.1, kC);
  CHECK(z.theta == 0.0);
  CHECK(z.total_sigma() == 0.0);
  CHECK_THROWS_AS(extract_moment(NAN, 0.0, 0.0, kC), std::invalid_argument);
  CHECK_THROWS_AS(extract_moment(1.0, 0.0, -0.1, kC), std::invalid_argument);
}

TEST_CASE("exact synthetic scan returns the injected moment") {
  for (double theta_true : {1.917, 1.83, 0.5}) {
    const double theta = theta_true * kC.quadrupole_unit();
    std::vector<ScanPoint> pts;
    for (double g : {8.0, 15.0, 22.0, 30.0, 40.0}) {
      const auto trap = TrapEnvironment::from_gradient(g * units::volt_per_mm2, kC);
      const double rate = phase_rate(psi1_state(), trap, {}, {}, theta, trap.separation(kC), kC).total;
      pts.push_back({g, units::rad_per_s_to_hz(rate), 0.05});
    }
    const auto fit = fit_linear_weighted(pts);
    const auto m = extract_moment(fit.slope, fit.slope_error(), 0.0, kC);
    CHECK(std::abs(m.theta - theta_true) <= 1e-10 * theta_true);
    CHECK(std::abs(fit.intercept) < 1e-9);
  }
}

TEST_CASE("offset decomposition") {
  const double b0 = 2.9 * units::gauss;
  const double c2 = -2.9 / (b0 * b0);
  const auto d = decompose_offset(-2.4, b0, c2);
  CHECK(d.second_order_zeeman == doctest::Approx(-2.9));
  CHECK(d.stray_quadrupole == doctest::Approx(0.5));
  CHECK(decompose_offset(-2.4, b0, 0.0).stray_quadrupole == -2.4);
  CHECK(decompose_offset(-2.4, 0.0, c2).second_order_zeeman == 0.0);

  const auto lit = decompose_offset(-2.4, b0, -0.3448 * units::hz_per_gauss2);
  CHECK(lit.second_order_zeeman == doctest::Approx(-2.9).epsilon(1e-3));
}
