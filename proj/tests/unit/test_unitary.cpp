#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "../support/oracles.hpp"
#include "dqhe/probes.hpp"
#include "dqhe/unitary.hpp"

using namespace dqhe;

namespace {

const double kH76 = units::mhz_to_rad_per_ns(76.0);

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

SpinChainSpec isotropic_chain(int n, double J) { return SpinChainSpec::uniform(n, CouplingStrengths::isotropic(J)); }

}  // namespace

TEST_CASE("single free spin responds linearly") {
  const auto p = RampProtocol::from_ramp_time(100.0, ConstantField{kH76});
  const auto traj = evolve(isotropic_chain(1, 0.0), p);
  // F = 1/2 at theta = pi/2, so <sigma_y> = F v / h
  CHECK(traj.sigma_y[0] == doctest::Approx(0.5 * p.v / kH76).epsilon(0.02));
  CHECK(berry_curvature_dynamical(traj).F_theta_phi == doctest::Approx(0.5).epsilon(0.02));
  CHECK(traj.theta_end == doctest::Approx(units::pi / 2));
  CHECK(traj.v_theta_end == doctest::Approx(p.v));
}

TEST_CASE("uncoupled qubits add up") {
  const auto p = RampProtocol::from_ramp_time(60.0, ConstantField{kH76});
  const double single = total(evolve(isotropic_chain(1, 0.0), p).sigma_y);
  for (int n : {2, 3, 4}) {
    CAPTURE(n);
    const auto traj = evolve(isotropic_chain(n, 0.0), p);
    CHECK(total(traj.sigma_y) == doctest::Approx(n * single).epsilon(1e-6));
    CHECK(berry_curvature_dynamical(traj).F_theta_phi == doctest::Approx(n * 0.5).epsilon(0.02));
  }
}

TEST_CASE("two coupled qubits sit on the unit plateau") {
  const auto p = RampProtocol::from_ramp_time(100.0, ConstantField{kH76});
  const auto traj = evolve(isotropic_chain(2, 0.4 * kH76), p);
  CHECK(std::abs(berry_curvature_dynamical(traj).F_theta_phi - 1.0) <= 0.02);
  for (double s : traj.sigma_y) CHECK(std::abs(s) <= 1.0);
}

TEST_CASE("norm is conserved") {
  for (int n : {2, 4, 6}) {
    CAPTURE(n);
    const auto p = RampProtocol::from_ramp_time(100.0, ConstantField{kH76});
    std::vector<double> observe;
    for (int k = 1; k <= 10; ++k) observe.push_back(0.157 * k);
    const auto traj = evolve(isotropic_chain(n, 0.3 * kH76), p, {}, observe);
    CHECK(traj.max_norm_error <= 1e-8);
    CHECK(std::abs(traj.final_state.norm() - 1.0) <= 1e-8);
    for (const auto& s : traj.samples) CHECK(std::abs(s.norm - 1.0) <= 1e-8);
  }
}

TEST_CASE("global phase of the initial state is irrelevant") {
  const auto p = RampProtocol::from_ramp_time(40.0, ConstantField{kH76});
  const ChainOperators ops(3, std::vector<CouplingStrengths>(2, CouplingStrengths{0.2, 0.2, 0.15}));
  const Vector g = ground_state(ops.hamiltonian({kH76, 0.0, 0.0})).state;
  const auto a = evolve_from(ops, 0.2, p, g);
  for (double phase : {0.3, 1.7, -2.9}) {
    const auto b = evolve_from(ops, 0.2, p, g * std::polar(1.0, phase));
    for (std::size_t j = 0; j < a.sigma_y.size(); ++j) CHECK(b.sigma_y[j] == doctest::Approx(a.sigma_y[j]).epsilon(1e-12));
  }
}

TEST_CASE("halving the tolerances changes the response by less than 1e-6") {
  const auto p = RampProtocol::from_ramp_time(100.0, ConstantField{kH76});
  const auto chain = isotropic_chain(4, 0.25 * kH76);
  EvolverConfig cfg;
  const double base = total(evolve(chain, p, cfg).sigma_y);
  cfg.rel_tol /= 2;
  cfg.abs_tol /= 2;
  const double fine = total(evolve(chain, p, cfg).sigma_y);
  CHECK(std::abs(base - fine) < 1e-6);
}

TEST_CASE("fixed-step fallback agrees with the adaptive method") {
  const auto p = RampProtocol::from_ramp_time(30.0, ConstantField{kH76});
  const auto chain = isotropic_chain(2, 0.3 * kH76);
  EvolverConfig rk4;
  rk4.method = IntegrationMethod::ClassicalRK4;
  rk4.fixed_step = 0.01;
  const auto a = evolve(chain, p);
  const auto b = evolve(chain, p, rk4);
  CHECK(total(a.sigma_y) == doctest::Approx(total(b.sigma_y)).epsilon(1e-7));
}

TEST_CASE("observation samples equal shorter ramps") {
  auto p = RampProtocol::from_ramp_time(50.0, ConstantField{kH76});
  p.theta_final = units::pi;
  const auto chain = isotropic_chain(2, 0.3 * kH76);
  const std::vector<double> angles = {2.0, 0.5, 1.2};
  const auto traj = evolve(chain, p, {}, angles);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    RampProtocol shorter = p;
    shorter.theta_final = angles[k];
    const auto direct = evolve(chain, shorter);
    CAPTURE(angles[k]);
    CHECK(traj.samples[k].theta == doctest::Approx(angles[k]));
    CHECK(total(traj.samples[k].sigma_y) == doctest::Approx(total(direct.sigma_y)).epsilon(1e-7));
  }
  CHECK_THROWS(evolve(chain, RampProtocol::from_ramp_time(50.0, ConstantField{kH76}), {}, std::vector<double>{2.0}));
}

TEST_CASE("qubit relabeling leaves F unchanged") {
  const auto p = RampProtocol::from_ramp_time(80.0, ConstantField{kH76});
  const std::vector<CouplingStrengths> bonds = {CouplingStrengths::isotropic(0.2), CouplingStrengths::isotropic(0.35)};
  const std::vector<CouplingStrengths> reversed = {bonds[1], bonds[0]};
  const auto a = evolve(SpinChainSpec{3, bonds, {}}, p);
  const auto b = evolve(SpinChainSpec{3, reversed, {}}, p);
  CHECK(berry_curvature_dynamical(a).F_theta_phi == doctest::Approx(berry_curvature_dynamical(b).F_theta_phi).epsilon(1e-7));
  CHECK(a.sigma_y[0] == doctest::Approx(b.sigma_y[2]).epsilon(1e-7));
}

TEST_CASE("magnetization is linear in the ramp velocity with zero intercept") {
  const auto chain = isotropic_chain(2, 0.4 * kH76);
  const auto tmpl = RampProtocol::from_ramp_time(100.0, ConstantField{kH76});
  std::vector<double> v;
  for (double t = 60.0; t <= 200.0; t += 10.0) v.push_back(units::pi / t);
  const auto curve = magnetization_response_curve(chain, tmpl, v);
  std::vector<double> x, y;
  for (const auto& r : curve) {
    x.push_back(r.v);
    y.push_back(r.M_theta);
    CHECK(r.F == doctest::Approx(r.M_theta / r.v));
  }
  const LinearFit fit = fit_line(x, y);
  CHECK(std::abs(fit.intercept) <= 1e-3 * kH76);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.max_relative_residual <= 0.05);
  CHECK_THROWS(magnetization_response_curve(chain, tmpl, std::vector<double>{0.0}));
}

TEST_CASE("line fit") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {3, 5, 7, 9};
  const auto fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.max_relative_residual == doctest::Approx(0.0));
}
