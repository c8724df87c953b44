#pragma once

// Linear-response probes: generalized force, Berry curvature (dynamical and
// eigenstate-sum reference), Chern number and plateau-transition location.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqhe/spin_chain.hpp"

namespace dqhe {

struct TrajectoryResult;
struct OpenTrajectoryResult;

/// M_theta = -<dH/dphi> at phi = 0, i.e. h sin(theta) sum_j <sigma^y_j>.
/// Throws std::domain_error for theta outside (0, pi].
double generalized_force(std::span<const double> sigma_y, double h, double theta);

struct ProbeResult {
  double M_theta = 0.0;
  double F_theta_phi = 0.0;
  double theta_measured = 0.0;
  double v_theta_at_measure = 0.0;
  std::vector<double> per_qubit_sigma_y;
};

/// F = M_theta / v_theta. Throws std::domain_error when v_theta vanishes.
ProbeResult berry_curvature(std::span<const double> sigma_y, double h, double theta, double v_theta);
ProbeResult berry_curvature_dynamical(const TrajectoryResult& traj);
ProbeResult berry_curvature_dynamical(const OpenTrajectoryResult& traj);

class DegenerateGroundState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adiabatic-perturbation-theory Berry curvature of the ground state,
///   F = 2 Im sum_{n>0} <0|dH/dtheta|n><n|dH/dphi|0> / (E_n - E_0)^2,
/// signed so that M_theta = F v_theta. Throws DegenerateGroundState when the
/// gap is below gap_tolerance * max|E|.
double kubo_curvature(const ChainOperators& ops, const MagneticField& field, double gap_tolerance = 1e-9);

struct ChernResult {
  double Ch = 0.0;
  std::vector<double> theta_grid;
  std::vector<double> F_values;
  std::string quadrature = "trapezoid";
};

/// Trapezoidal integral of F over [0, pi] on a uniform grid; the endpoints
/// contribute F(0) = F(pi) = 0. Interior sampler failures are rethrown with
/// the failing grid angle.
ChernResult chern_number(const std::function<double(double)>& F_of_theta, int grid_size = 101);

/// Trapezoid over given samples (grid must start at 0 and end at pi).
ChernResult chern_from_samples(std::vector<double> theta_grid, std::vector<double> F_values);

/// Uniform grid of grid_size points on [0, pi].
std::vector<double> chern_grid(int grid_size);

struct Transition {
  double location = 0.0;     // midpoint of the bracketing grid interval
  double uncertainty = 0.0;  // width of that interval
  int from_level = 0;
  int to_level = 0;
};

/// All jumps between integer plateau levels along a scanned curve. A point
/// belongs to a plateau when it lies within plateau_tolerance of an integer;
/// each jump is placed where the curve crosses the mid-level between two
/// consecutive plateau points.
std::vector<Transition> detect_transitions(std::span<const double> control, std::span<const double> F,
                                           double plateau_tolerance = 0.25);

/// First transition, or nullopt for a curve on a single plateau.
std::optional<Transition> detect_transition(std::span<const double> control, std::span<const double> F,
                                            double plateau_tolerance = 0.25);

}  // namespace dqhe
