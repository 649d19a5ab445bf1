#include <cmath>

#include "doctest.h"
#include "dfsq/trap.hpp"

using namespace dfsq;

namespace {
const PhysicalConstants kC;
constexpr double kTwoPiKHz = 2.0 * M_PI * 1e3;
}  // namespace

TEST_CASE("axial frequency follows sqrt(k U)") {
  const auto cal = TrapCalibration::from_reference(500.0, 850.0 * kTwoPiKHz);
  CHECK(axial_frequency(500.0, cal) == doctest::Approx(850.0 * kTwoPiKHz));
  CHECK(axial_frequency(2000.0, cal) == doctest::Approx(1700.0 * kTwoPiKHz));
  CHECK(axial_frequency(750.0, cal) / kTwoPiKHz == doctest::Approx(1041.0).epsilon(1e-4));
  CHECK(axial_frequency(0.0, cal) == 0.0);
  CHECK_THROWS_AS(axial_frequency(-1.0, cal), std::invalid_argument);
  CHECK_THROWS_AS(TrapCalibration::from_reference(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("field gradient calibration") {
  const double w = 850.0 * kTwoPiKHz;
  const double g = field_gradient(w, kC);
  CHECK(g < 0.0);
  CHECK(-g / 1e6 == doctest::Approx(11.8).epsilon(5e-3));
  CHECK(field_gradient(0.0, kC) == 0.0);
  CHECK(field_gradient(2.0 * w, kC) == doctest::Approx(4.0 * g).epsilon(1e-14));
  CHECK(axial_frequency_for_gradient(g, kC) == doctest::Approx(w).epsilon(1e-14));
}

TEST_CASE("two-ion spacing") {
  CHECK(ion_separation(850.0 * kTwoPiKHz, kC) * 1e6 == doctest::Approx(6.2).epsilon(0.02));
  CHECK(ion_separation(1700.0 * kTwoPiKHz, kC) * 1e6 == doctest::Approx(3.9).epsilon(0.02));
  const double w = 1.0e6;
  CHECK(ion_separation(w, kC) / ion_separation(4.0 * w, kC) ==
        doctest::Approx(std::pow(4.0, 2.0 / 3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(ion_separation(0.0, kC), std::domain_error);
}

TEST_CASE("gradient is linear in voltage and d^3 w^2 is constant") {
  const auto cal = TrapCalibration::from_reference(500.0, 850.0 * kTwoPiKHz);
  const double slope = -kC.ion_mass * cal.k / kC.elementary_charge;
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 1; i <= 10; ++i) {
    const double u = 200.0 * i;
    const double g = field_gradient(axial_frequency(u, cal), kC);
    CHECK(std::abs(g - slope * u) <= 1e-10 * std::abs(slope * u));
    const double w = axial_frequency(u, cal);
    const double inv = std::pow(ion_separation(w, kC), 3) * w * w;
    lo = std::min(lo, inv);
    hi = std::max(hi, inv);
  }
  CHECK((hi - lo) / lo < 1e-10);
}

TEST_CASE("neighbour ion doubles the gradient") {
  CHECK(gradient_at_ion(17.7e6) == 35.4e6);
  CHECK(gradient_at_ion(0.0) == 0.0);
  CHECK(gradient_at_ion(-3.0) == -6.0);
}

TEST_CASE("trap environment construction") {
  const auto cal = TrapCalibration::from_reference(500.0, 850.0 * kTwoPiKHz);
  const auto t = TrapEnvironment::from_voltage(750.0, cal, -1.0e5);
  REQUIRE(t.tip_voltage.has_value());
  CHECK(t.external_gradient(kC) == doctest::Approx(t.tip_gradient(kC) - 1.0e5));

  const auto g = TrapEnvironment::from_gradient(17.7e6, kC);
  CHECK(-g.tip_gradient(kC) == doctest::Approx(17.7e6).epsilon(1e-14));
  CHECK_FALSE(g.tip_voltage.has_value());
  CHECK_THROWS_AS(TrapEnvironment::from_gradient(-1.0, kC), std::invalid_argument);
}
