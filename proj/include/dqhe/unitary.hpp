#pragma once

// Closed-system evolution of the driven chain: Schroedinger equation from the
// theta = 0 ground state through the quadratic ramp.

#include <span>
#include <vector>

#include "dqhe/integrator.hpp"
#include "dqhe/schedule.hpp"
#include "dqhe/spin_chain.hpp"

namespace dqhe {

/// Observables at one instant of the ramp.
struct ObservationSample {
  double t = 0.0;
  double theta = 0.0;
  double v_theta = 0.0;
  double h = 0.0;
  std::vector<double> sigma_y;  // per qubit
  double norm = 1.0;
};

struct TrajectoryResult {
  Vector final_state;
  std::vector<double> sigma_y;  // per qubit, at the end of the protocol
  double t_end = 0.0;
  double theta_end = 0.0;
  double v_theta_end = 0.0;
  double h = 0.0;
  bool degenerate_start = false;
  double max_norm_error = 0.0;
  // One entry per requested observation angle, in request order.
  std::vector<ObservationSample> samples;
  IntegrationStats stats;
};

/// Automatic step bound: one tenth of the shortest period 2 pi / max|E| of H
/// at the start and end of the ramp.
double automatic_max_step(const ChainOperators& ops, const RampProtocol& protocol, double jbar);

/// Evolves from the theta = 0 ground state of the chain (the field of `chain`
/// is ignored; the protocol supplies it) to the end of the ramp. Optional
/// observation angles in (0, theta_final] are recorded on the way.
TrajectoryResult evolve(const SpinChainSpec& chain, const RampProtocol& protocol,
                        const EvolverConfig& cfg = {}, std::span<const double> observe_thetas = {});

/// Same, from an explicit initial state.
TrajectoryResult evolve_from(const ChainOperators& ops, double jbar, const RampProtocol& protocol,
                             const Vector& psi0, const EvolverConfig& cfg = {},
                             std::span<const double> observe_thetas = {});

struct ResponsePoint {
  double v = 0.0;        // rad/ns, ramp velocity (= v_theta at theta = pi/2)
  double t_ramp = 0.0;   // ns
  double M_theta = 0.0;  // rad/ns
  double F = 0.0;
};

/// Generalized force at theta = pi/2 for each ramp velocity; the protocol
/// template supplies field rule and azimuth.
std::vector<ResponsePoint> magnetization_response_curve(const SpinChainSpec& chain,
                                                        const RampProtocol& protocol_template,
                                                        std::span<const double> velocities,
                                                        const EvolverConfig& cfg = {});

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_relative_residual = 0.0;  // max |residual| / max |y|
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dqhe
