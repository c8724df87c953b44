#pragma once

// Markovian master equation for the driven chain with independent per-qubit
// relaxation and pure dephasing:
//   drho/dt = -i[H, rho] + sum_j L_j[rho]
//   L_j[rho] = g(1+n0) D[s-_j] + g n0 D[s+_j] + G D[sz_j],  D[A] = 2 A rho A^+ - {A^+ A, rho}
// with s- = |down><up| in the sigma_z basis.

#include <vector>

#include "dqhe/integrator.hpp"
#include "dqhe/schedule.hpp"
#include "dqhe/spin_chain.hpp"

namespace dqhe {

enum class RateConvention {
  // gamma = 1/T1 and Gamma = 1/T2 - 1/(2 T1) inserted directly into the
  // dissipator above (population decay rate 2 gamma per qubit).
  Paper,
  // Rates rescaled so a single qubit's population relaxes with time T1 and
  // its coherence with time T2.
  Calibrated,
};

struct DecoherenceParams {
  double T1 = 658.0;              // ns
  double T2 = 812.0;              // ns
  double temperature_mK = 30.0;
  double qubit_frequency_ghz = 4.77;
  bool thermal_occupation = false;  // false: n0 = 0
  RateConvention convention = RateConvention::Paper;

  void validate() const;
  /// Relaxation weight gamma entering the dissipator (1/ns).
  double gamma() const;
  /// Dephasing weight Gamma entering the dissipator (1/ns).
  double gamma_phi() const;
  /// Bose occupation 1/(exp(hbar omega_q / k_B T) - 1).
  double thermal_boson_number() const;
  double n0() const { return thermal_occupation ? thermal_boson_number() : 0.0; }

  static DecoherenceParams none();
};

/// Per-qubit dissipators for an n-qubit register, with precomputed jump
/// operators. Immutable after construction.
class Dissipator {
 public:
  Dissipator(int n, const DecoherenceParams& params);
  /// Explicit weights (1/ns), bypassing the T1/T2 conversion.
  Dissipator(int n, double gamma, double gamma_phi, double n0 = 0.0);

  /// Adds sum_j L_j[rho] to out.
  void accumulate(const Matrix& rho, Matrix& out) const;

 private:
  struct Channel {
    double weight;
    Matrix jump;
    Matrix jump_adj;
    Matrix number;  // jump^+ jump
  };
  void build(int n, double gamma, double gamma_phi, double n0);

  std::vector<Channel> channels_;
};

/// Full right-hand side -i[H, rho] + sum_j L_j[rho].
Matrix lindblad_rhs(const Matrix& rho, const Matrix& H, const Dissipator& dissipator);

struct DensityDiagnostics {
  double trace_error = 0.0;        // |Tr rho - 1|
  double hermiticity_error = 0.0;  // ||rho - rho^+||
  double min_eigenvalue = 0.0;
};

DensityDiagnostics diagnose(const Matrix& rho);

struct OpenTrajectoryResult {
  Matrix final_rho;
  std::vector<double> sigma_y;  // per qubit, Tr[rho(t_f) sigma^y_j]
  double t_ramp_end = 0.0;
  double t_final = 0.0;
  double theta_end = 0.0;
  double v_theta_end = 0.0;
  double h = 0.0;
  bool degenerate_start = false;
  DensityDiagnostics worst;  // worst values seen at ramp end and t_f
  IntegrationStats stats;
};

/// Evolves rho(0) = |g><g| (theta = 0 ground state) through the ramp and the
/// measurement window. Throws IntegrationError when the final state violates
/// positivity by more than 1e-6.
OpenTrajectoryResult evolve_open(const SpinChainSpec& chain, const RampProtocol& protocol,
                                 const DecoherenceParams& params, const EvolverConfig& cfg = {});

OpenTrajectoryResult evolve_open(const SpinChainSpec& chain, const RampProtocol& protocol,
                                 const Dissipator& dissipator, const EvolverConfig& cfg = {});

}  // namespace dqhe
