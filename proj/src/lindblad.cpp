#include "dqhe/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dqhe/unitary.hpp"
#include "dqhe/units.hpp"

namespace dqhe {

namespace {

Matrix embed(int n, int site, const Matrix& single) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const Matrix factor = k == site ? single : Matrix::Identity(2, 2);
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * factor;
    }
    out = std::move(next);
  }
  return out;
}

constexpr double kPositivityFailure = 1e-6;

}  // namespace

void DecoherenceParams::validate() const {
  if (!(T1 > 0.0) || !(T2 > 0.0)) throw std::invalid_argument("T1 and T2 must be positive");
  if (T2 > 2.0 * T1 * (1.0 + 1e-12)) {
    throw std::invalid_argument("T2 must not exceed 2 T1 (negative pure-dephasing rate)");
  }
  if (thermal_occupation && !(temperature_mK > 0.0)) {
    throw std::invalid_argument("temperature must be positive for thermal occupation");
  }
}

double DecoherenceParams::gamma() const {
  return convention == RateConvention::Paper ? 1.0 / T1 : 1.0 / (2.0 * T1);
}

double DecoherenceParams::gamma_phi() const {
  const double pure = std::max(0.0, 1.0 / T2 - 1.0 / (2.0 * T1));
  return convention == RateConvention::Paper ? pure : pure / 4.0;
}

double DecoherenceParams::thermal_boson_number() const {
  const double omega = units::two_pi * qubit_frequency_ghz * 1e9;  // rad/s
  const double x = units::hbar * omega / (units::k_boltzmann * temperature_mK * 1e-3);
  return 1.0 / std::expm1(x);
}

DecoherenceParams DecoherenceParams::none() {
  DecoherenceParams p;
  p.T1 = std::numeric_limits<double>::infinity();
  p.T2 = std::numeric_limits<double>::infinity();
  return p;
}

Dissipator::Dissipator(int n, const DecoherenceParams& params) {
  if (std::isinf(params.T1) && std::isinf(params.T2)) {
    build(n, 0.0, 0.0, 0.0);
    return;
  }
  params.validate();
  build(n, params.gamma(), params.gamma_phi(), params.n0());
}

Dissipator::Dissipator(int n, double gamma, double gamma_phi, double n0) {
  if (gamma < 0.0 || gamma_phi < 0.0 || n0 < 0.0) throw std::invalid_argument("negative dissipation weight");
  build(n, gamma, gamma_phi, n0);
}

void Dissipator::build(int n, double gamma, double gamma_phi, double n0) {
  if (n < 1) throw std::invalid_argument("register needs at least one qubit");
  Matrix lower = Matrix::Zero(2, 2);
  lower(1, 0) = 1.0;  // |down><up|
  const Matrix raise = lower.adjoint();
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  auto add = [&](double weight, const Matrix& single, int site) {
    if (weight == 0.0) return;
    Channel ch;
    ch.weight = weight;
    ch.jump = embed(n, site, single);
    ch.jump_adj = ch.jump.adjoint();
    ch.number = ch.jump_adj * ch.jump;
    channels_.push_back(std::move(ch));
  };
  for (int j = 0; j < n; ++j) {
    add(gamma * (1.0 + n0), lower, j);
    add(gamma * n0, raise, j);
    add(gamma_phi, z, j);
  }
}

void Dissipator::accumulate(const Matrix& rho, Matrix& out) const {
  for (const auto& ch : channels_) {
    out.noalias() += (2.0 * ch.weight) * (ch.jump * rho * ch.jump_adj);
    out.noalias() -= ch.weight * (ch.number * rho);
    out.noalias() -= ch.weight * (rho * ch.number);
  }
}

Matrix lindblad_rhs(const Matrix& rho, const Matrix& H, const Dissipator& dissipator) {
  const Complex minus_i(0.0, -1.0);
  Matrix out = minus_i * (H * rho - rho * H);
  dissipator.accumulate(rho, out);
  return out;
}

DensityDiagnostics diagnose(const Matrix& rho) {
  DensityDiagnostics d;
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  d.hermiticity_error = (rho - rho.adjoint()).norm();
  const Matrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

OpenTrajectoryResult evolve_open(const SpinChainSpec& chain, const RampProtocol& protocol,
                                 const DecoherenceParams& params, const EvolverConfig& cfg) {
  return evolve_open(chain, protocol, Dissipator(chain.n, params), cfg);
}

OpenTrajectoryResult evolve_open(const SpinChainSpec& chain, const RampProtocol& protocol,
                                 const Dissipator& dissipator, const EvolverConfig& cfg) {
  protocol.validate();
  const ChainOperators ops(chain.n, chain.bonds);
  const double jbar = chain.jbar();
  const GroundState gs = ground_state(ops.hamiltonian(sample(protocol, jbar, 0.0).field));

  double max_step = cfg.max_step;
  if (max_step <= 0.0) max_step = automatic_max_step(ops, protocol, jbar);

  const double t_end = protocol.end_time();
  const double t_final = t_end + protocol.t_meas;
  const Matrix H_end = ops.hamiltonian(sample(protocol, jbar, t_end).field);
  const bool frozen = protocol.measurement_drive == MeasurementDrive::Frozen;

  RungeKuttaIntegrator<Matrix> integrator(cfg, max_step);
  Matrix H(ops.dim(), ops.dim());
  const Complex minus_i(0.0, -1.0);
  auto ramp_rhs = [&](double t, const Matrix& rho, Matrix& drho) {
    ops.hamiltonian_into(sample(protocol, jbar, t).field, H);
    drho.noalias() = minus_i * (H * rho);
    drho.noalias() -= minus_i * (rho * H);
    dissipator.accumulate(rho, drho);
  };
  auto window_rhs = [&](double, const Matrix& rho, Matrix& drho) {
    if (frozen) {
      drho.noalias() = minus_i * (H_end * rho);
      drho.noalias() -= minus_i * (rho * H_end);
    } else {
      drho.setZero(rho.rows(), rho.cols());
    }
    dissipator.accumulate(rho, drho);
  };

  Matrix rho = gs.state * gs.state.adjoint();
  integrator.advance(ramp_rhs, rho, 0.0, t_end);
  const DensityDiagnostics at_ramp_end = diagnose(rho);
  integrator.advance(window_rhs, rho, t_end, t_final);
  const DensityDiagnostics at_final = diagnose(rho);

  OpenTrajectoryResult r;
  r.worst.trace_error = std::max(at_ramp_end.trace_error, at_final.trace_error);
  r.worst.hermiticity_error = std::max(at_ramp_end.hermiticity_error, at_final.hermiticity_error);
  r.worst.min_eigenvalue = std::min(at_ramp_end.min_eigenvalue, at_final.min_eigenvalue);
  if (r.worst.min_eigenvalue < -kPositivityFailure) {
    throw IntegrationError("density matrix lost positivity (min eigenvalue " +
                           std::to_string(r.worst.min_eigenvalue) +
                           "); tighten integrator tolerances");
  }

  r.sigma_y.resize(static_cast<std::size_t>(chain.n));
  for (int j = 0; j < chain.n; ++j) {
    r.sigma_y[static_cast<std::size_t>(j)] = (rho * ops.site(j, Axis::Y)).trace().real();
  }
  const auto end = sample(protocol, jbar, t_end);
  r.t_ramp_end = t_end;
  r.t_final = t_final;
  r.theta_end = end.field.theta;
  r.v_theta_end = end.v_theta;
  r.h = end.field.h;
  r.degenerate_start = gs.degenerate;
  r.final_rho = std::move(rho);
  r.stats = integrator.stats();
  return r;
}

}  // namespace dqhe
