#include "dqhe/probes.hpp"

#include <cmath>
#include <numeric>

#include "dqhe/lindblad.hpp"
#include "dqhe/unitary.hpp"
#include "dqhe/units.hpp"

namespace dqhe {

double generalized_force(std::span<const double> sigma_y, double h, double theta) {
  if (!(theta > 0.0) || theta > units::pi + 1e-12) {
    throw std::domain_error("generalized force needs theta in (0, pi]");
  }
  const double total = std::accumulate(sigma_y.begin(), sigma_y.end(), 0.0);
  return h * std::sin(theta) * total;
}

ProbeResult berry_curvature(std::span<const double> sigma_y, double h, double theta, double v_theta) {
  if (v_theta == 0.0) throw std::domain_error("Berry curvature undefined at zero angular velocity");
  ProbeResult r;
  r.M_theta = generalized_force(sigma_y, h, theta);
  r.F_theta_phi = r.M_theta / v_theta;
  r.theta_measured = theta;
  r.v_theta_at_measure = v_theta;
  r.per_qubit_sigma_y.assign(sigma_y.begin(), sigma_y.end());
  return r;
}

ProbeResult berry_curvature_dynamical(const TrajectoryResult& traj) {
  return berry_curvature(traj.sigma_y, traj.h, traj.theta_end, traj.v_theta_end);
}

ProbeResult berry_curvature_dynamical(const OpenTrajectoryResult& traj) {
  return berry_curvature(traj.sigma_y, traj.h, traj.theta_end, traj.v_theta_end);
}

double kubo_curvature(const ChainOperators& ops, const MagneticField& field, double gap_tolerance) {
  const Spectrum spec = diagonalize(ops.hamiltonian(field));
  const double scale = std::max(spec.energies.cwiseAbs().maxCoeff(), 1e-300);
  if (spec.gap() <= gap_tolerance * scale) {
    throw DegenerateGroundState("ground state degenerate at theta = " + std::to_string(field.theta));
  }
  const Matrix d_theta = ops.d_theta(field);
  const Matrix d_phi = ops.d_phi(field);
  const Vector ground = spec.states.col(0);
  const Vector a = spec.states.adjoint() * (d_theta.adjoint() * ground);  // <n|dH_theta|0>^* rows
  const Vector b = spec.states.adjoint() * (d_phi * ground);              // <n|dH_phi|0>
  double sum = 0.0;
  for (Eigen::Index n = 1; n < spec.energies.size(); ++n) {
    const double de = spec.energies(n) - spec.energies(0);
    // <0|dH_theta|n> = conj(<n|dH_theta^+|0>)
    sum += (std::conj(a(n)) * b(n)).imag() / (de * de);
  }
  return 2.0 * sum;
}

std::vector<double> chern_grid(int grid_size) {
  if (grid_size < 3) throw std::invalid_argument("Chern grid needs at least 3 points");
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int k = 0; k < grid_size; ++k) {
    grid[static_cast<std::size_t>(k)] = units::pi * static_cast<double>(k) / (grid_size - 1);
  }
  return grid;
}

ChernResult chern_from_samples(std::vector<double> theta_grid, std::vector<double> F_values) {
  if (theta_grid.size() != F_values.size() || theta_grid.size() < 3) {
    throw std::invalid_argument("Chern integration needs >= 3 matched samples");
  }
  if (std::abs(theta_grid.front()) > 1e-12 || std::abs(theta_grid.back() - units::pi) > 1e-12) {
    throw std::invalid_argument("Chern grid must span [0, pi]");
  }
  ChernResult r;
  for (std::size_t k = 0; k + 1 < theta_grid.size(); ++k) {
    r.Ch += 0.5 * (theta_grid[k + 1] - theta_grid[k]) * (F_values[k] + F_values[k + 1]);
  }
  r.theta_grid = std::move(theta_grid);
  r.F_values = std::move(F_values);
  return r;
}

ChernResult chern_number(const std::function<double(double)>& F_of_theta, int grid_size) {
  std::vector<double> grid = chern_grid(grid_size);
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    try {
      values[k] = F_of_theta(grid[k]);
    } catch (const std::exception& e) {
      throw std::runtime_error("Berry curvature sampler failed at theta = " + std::to_string(grid[k]) +
                               ": " + e.what());
    }
  }
  return chern_from_samples(std::move(grid), std::move(values));
}

std::vector<Transition> detect_transitions(std::span<const double> control, std::span<const double> F,
                                           double plateau_tolerance) {
  if (control.size() != F.size()) throw std::invalid_argument("control and curve sizes differ");
  std::vector<Transition> out;
  std::ptrdiff_t last_plateau = -1;
  int last_level = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double level = std::round(F[i]);
    if (std::abs(F[i] - level) > plateau_tolerance) continue;
    const int lvl = static_cast<int>(level);
    if (last_plateau >= 0 && lvl != last_level) {
      const double mid = 0.5 * (last_level + lvl);
      const bool rising = lvl > last_level;
      // First interval after the last plateau point where F crosses the mid-level.
      std::size_t k = static_cast<std::size_t>(last_plateau);
      while (k + 1 < i && (rising ? F[k + 1] < mid : F[k + 1] > mid)) ++k;
      Transition t;
      t.location = 0.5 * (control[k] + control[k + 1]);
      t.uncertainty = std::abs(control[k + 1] - control[k]);
      t.from_level = last_level;
      t.to_level = lvl;
      out.push_back(t);
    }
    last_plateau = static_cast<std::ptrdiff_t>(i);
    last_level = lvl;
  }
  return out;
}

std::optional<Transition> detect_transition(std::span<const double> control, std::span<const double> F,
                                            double plateau_tolerance) {
  auto all = detect_transitions(control, F, plateau_tolerance);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace dqhe
