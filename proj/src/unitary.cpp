#include "dqhe/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dqhe {

namespace {

std::vector<double> sigma_y_profile(const ChainOperators& ops, const Vector& psi) {
  std::vector<double> out(static_cast<std::size_t>(ops.qubits()));
  for (int j = 0; j < ops.qubits(); ++j) out[static_cast<std::size_t>(j)] = expectation(psi, ops.site(j, Axis::Y));
  return out;
}

double spectral_radius(const Matrix& H) {
  return diagonalize(H).energies.cwiseAbs().maxCoeff();
}

}  // namespace

double automatic_max_step(const ChainOperators& ops, const RampProtocol& protocol, double jbar) {
  const double r0 = spectral_radius(ops.hamiltonian(sample(protocol, jbar, 0.0).field));
  const double r1 = spectral_radius(ops.hamiltonian(sample(protocol, jbar, protocol.end_time()).field));
  const double radius = std::max(r0, r1);
  if (radius <= 0.0) return 0.0;
  return units::two_pi / radius / 10.0;
}

TrajectoryResult evolve(const SpinChainSpec& chain, const RampProtocol& protocol,
                        const EvolverConfig& cfg, std::span<const double> observe_thetas) {
  const ChainOperators ops(chain.n, chain.bonds);
  const double jbar = chain.jbar();
  const auto start = sample(protocol, jbar, 0.0);
  const GroundState gs = ground_state(ops.hamiltonian(start.field));
  TrajectoryResult result = evolve_from(ops, jbar, protocol, gs.state, cfg, observe_thetas);
  result.degenerate_start = gs.degenerate;
  return result;
}

TrajectoryResult evolve_from(const ChainOperators& ops, double jbar, const RampProtocol& protocol,
                             const Vector& psi0, const EvolverConfig& cfg,
                             std::span<const double> observe_thetas) {
  protocol.validate();
  if (psi0.size() != ops.dim()) throw std::invalid_argument("initial state has the wrong dimension");

  const double t_end = protocol.end_time();
  for (double theta : observe_thetas) {
    if (!(theta > 0.0) || theta > protocol.theta_final * (1.0 + 1e-12)) {
      throw std::invalid_argument("observation angle outside (0, theta_final]");
    }
  }

  double max_step = cfg.max_step;
  if (max_step <= 0.0) max_step = automatic_max_step(ops, protocol, jbar);

  RungeKuttaIntegrator<Vector> integrator(cfg, max_step);
  const Complex minus_i(0.0, -1.0);
  auto rhs = [&](double t, const Vector& y, Vector& dy) {
    ops.apply(sample(protocol, jbar, t).field, y, dy);
    dy *= minus_i;
  };

  std::vector<std::size_t> order(observe_thetas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return observe_thetas[a] < observe_thetas[b]; });

  TrajectoryResult result;
  result.samples.resize(observe_thetas.size());
  Vector psi = psi0;
  double t = 0.0;
  double max_norm_error = 0.0;
  for (std::size_t idx : order) {
    const double t_obs = std::min(protocol.time_at_theta(observe_thetas[idx]), t_end);
    integrator.advance(rhs, psi, t, t_obs);
    t = t_obs;
    const auto drive = sample(protocol, jbar, t);
    ObservationSample& s = result.samples[idx];
    s.t = t;
    s.theta = drive.field.theta;
    s.v_theta = drive.v_theta;
    s.h = drive.field.h;
    s.norm = psi.norm();
    s.sigma_y = sigma_y_profile(ops, psi);
    max_norm_error = std::max(max_norm_error, std::abs(s.norm - 1.0));
  }
  integrator.advance(rhs, psi, t, t_end);

  const auto end = sample(protocol, jbar, t_end);
  result.t_end = t_end;
  result.theta_end = end.field.theta;
  result.v_theta_end = end.v_theta;
  result.h = end.field.h;
  result.sigma_y = sigma_y_profile(ops, psi);
  result.max_norm_error = std::max(max_norm_error, std::abs(psi.norm() - 1.0));
  result.final_state = std::move(psi);
  result.stats = integrator.stats();
  return result;
}

std::vector<ResponsePoint> magnetization_response_curve(const SpinChainSpec& chain,
                                                        const RampProtocol& protocol_template,
                                                        std::span<const double> velocities,
                                                        const EvolverConfig& cfg) {
  std::vector<ResponsePoint> out;
  out.reserve(velocities.size());
  for (double v : velocities) {
    if (!(v > 0.0)) throw std::invalid_argument("ramp velocities must be positive");
    RampProtocol p = protocol_template;
    p.v = v;
    p.theta_final = units::pi / 2.0;
    const TrajectoryResult traj = evolve(chain, p, cfg);
    const double total = std::accumulate(traj.sigma_y.begin(), traj.sigma_y.end(), 0.0);
    ResponsePoint r;
    r.v = v;
    r.t_ramp = p.ramp_time();
    r.M_theta = traj.h * total;
    r.F = r.M_theta / traj.v_theta_end;
    out.push_back(r);
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ymax = 0.0;
  double rmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ymax = std::max(ymax, std::abs(y[i]));
    rmax = std::max(rmax, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
  }
  fit.max_relative_residual = ymax > 0.0 ? rmax / ymax : 0.0;
  return fit;
}

}  // namespace dqhe
