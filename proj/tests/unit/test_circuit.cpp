#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dqhe/circuit.hpp"
#include "dqhe/units.hpp"

using namespace dqhe;

namespace {
double mhz(double rad_per_ns) { return units::rad_per_ns_to_mhz(rad_per_ns); }
}  // namespace

TEST_CASE("josephson inductance") {
  // Phi0 / (2 pi 3 uA) by hand: 2.0678e-15 / 1.88496e-5 = 1.0970e-10 H
  CHECK(josephson_inductance(0.0, 3.0) == doctest::Approx(0.1097).epsilon(1e-3));
  CHECK(josephson_inductance(0.99 * 3.0, 3.0) > josephson_inductance(0.9 * 3.0, 3.0));
  CHECK(josephson_inductance(0.9 * 3.0, 3.0) > josephson_inductance(0.5 * 3.0, 3.0));
  CHECK_THROWS_AS(josephson_inductance(3.0, 3.0), std::domain_error);
  CHECK_THROWS_AS(josephson_inductance(3.5, 3.0), std::domain_error);
  CHECK_THROWS_AS(josephson_inductance(-0.1, 3.0), std::domain_error);
  // raw form without the flux quantum
  CHECK(josephson_inductance(0.0, 2.0, false) == doctest::Approx(0.5));
}

TEST_CASE("renormalized inductances") {
  const CircuitParams p = literal_fig2_params();
  const auto r = renormalized_inductances(p, 0.0);
  CHECK(r.factor == doctest::Approx(1.0 - 0.41 * 0.41 / 9.0).epsilon(1e-14));
  CHECK(r.factor == doctest::Approx(0.98132).epsilon(1e-5));
  CHECK(r.L_R == r.L_L);
  CHECK(r.M / p.M == doctest::Approx(r.L_R / p.L_R).epsilon(1e-15));
  CHECK(r.L_L / p.L_L == doctest::Approx(r.L_R / p.L_R).epsilon(1e-15));

  CircuitParams no_mutual = p;
  no_mutual.M = 0.0;
  const auto r0 = renormalized_inductances(no_mutual, 0.0);
  CHECK(r0.factor == 1.0);
  CHECK(r0.M == 0.0);

  CircuitParams asym = p;
  asym.L_L = 4.0;
  const auto ra = renormalized_inductances(asym, 0.0);
  CHECK(ra.M / asym.M == doctest::Approx(ra.L_L / asym.L_L).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CircuitParams p;
  CHECK_NOTHROW(p.validate());
  p.M = 3.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.C_int = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.N1 = -1.0;
  CHECK_THROWS_AS(couplings(p, 0.0), std::invalid_argument);
}

TEST_CASE("calibrated couplings reproduce the circuit anchors") {
  const CircuitParams p = calibrated_fig2_params();
  const auto c0 = couplings(p, 0.0);
  CHECK(mhz(c0.Jx) >= 35.0);
  CHECK(mhz(c0.Jx) <= 45.0);
  CHECK(std::abs(mhz(couplings(p, 0.93 * p.I_cr).Jx)) < 2.0);
  for (int k = 0; k <= 54; ++k) {
    const auto c = couplings(p, 0.01 * k * p.I_cr);
    CAPTURE(k);
    CHECK(c.Jx == c.Jy);
    CHECK(c.Jz / c.Jx >= 0.88);
    CHECK(c.Jz / c.Jx <= 1.0);
  }
  CHECK(c0.Jz / c0.Jx == doctest::Approx(calibration::ratio_at_zero_bias).epsilon(1e-9));
}

TEST_CASE("Jx decreases monotonically up to the zero crossing") {
  const CircuitParams p = calibrated_fig2_params();
  double prev = couplings(p, 0.0).Jx;
  for (int k = 1; k <= 93; ++k) {
    const double j = couplings(p, 0.01 * k * p.I_cr).Jx;
    CAPTURE(k);
    CHECK(j < prev);
    prev = j;
  }
}

TEST_CASE("literal reading misses the anchors") {
  const CircuitParams p = literal_fig2_params();
  const auto c0 = couplings(p, 0.0);
  CHECK(mhz(c0.Jx) > 100.0);
  CHECK(c0.Jz / c0.Jx < 0.1);
  CHECK(c0.Jx == c0.Jy);
}

TEST_CASE("jbar is the isotropic proxy") {
  const CouplingStrengths c{1.0, 2.0, 2.0};
  CHECK(c.jbar() == doctest::Approx(std::sqrt(9.0 / 3.0)));
  CHECK(CouplingStrengths::isotropic(0.7).jbar() == doctest::Approx(0.7));
}

TEST_CASE("bias_for_coupling inverts couplings") {
  const CircuitParams p = calibrated_fig2_params();
  for (double x : {0.0, 0.1, 0.3, 0.54, 0.8, 0.9}) {
    CAPTURE(x);
    const double target = couplings(p, x * p.I_cr).Jx;
    CHECK(bias_for_coupling(p, target) == doctest::Approx(x * p.I_cr).epsilon(1e-6));
  }
  CHECK(bias_for_coupling(p, 0.0) / p.I_cr == doctest::Approx(0.93).epsilon(0.03));
  CHECK_THROWS_AS(bias_for_coupling(p, 2.0 * couplings(p, 0.0).Jx), std::range_error);
}

TEST_CASE("frequency convention") {
  CircuitParams p;
  CHECK(p.omega_q() == doctest::Approx(units::two_pi * 4.77));
  p.frequency_convention = FrequencyConvention::Angular;
  CHECK(p.omega_q() == doctest::Approx(4.77));
}
