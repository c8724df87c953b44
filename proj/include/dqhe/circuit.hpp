#pragma once

// Mapping from superconducting phase-qubit circuit parameters and the bias
// current of the coupling junction to the XYZ exchange couplings of the
// effective spin chain.

#include <optional>

namespace dqhe {

enum class FrequencyConvention {
  Ordinary,  // quoted qubit frequency is nu, omega_q = 2*pi*nu
  Angular,   // quoted number is used directly as omega_q (rad/ns)
};

struct CircuitParams {
  double qubit_frequency_ghz = 4.77;
  FrequencyConvention frequency_convention = FrequencyConvention::Ordinary;
  double C_j = 1.0;     // pF
  double C_jp1 = 1.0;   // pF
  double C_int = 1.0;   // pF, coupling-junction capacitance
  double L_R = 3.0;     // nH
  double L_L = 3.0;     // nH
  double M = 0.41;      // nH, magnitude of the (negative) mutual inductance
  double I_cr = 3.0;    // uA
  double N1 = 5.0;
  double N2 = 5.0;
  double L_j = 0.7;     // nH, qubit inductance; metadata only, enters no formula
  bool flux_quantum_prefactor = true;
  // Multiplies both couplings. 1/4 reads the circuit formula as the
  // coefficient of S_j.S_{j+1} with S = sigma/2.
  double spin_normalization = 1.0;
  // Overrides the Jz prefactor 1/(6 sqrt(N1 N2)) when set.
  std::optional<double> jz_prefactor;

  /// Throws std::invalid_argument when a physical invariant is violated.
  void validate() const;

  /// Qubit angular frequency in rad/ns under the configured convention.
  double omega_q() const;
  double jz_coefficient() const;
};

/// Parameter set of the Fig. 2 circuit, evaluated literally.
CircuitParams literal_fig2_params();

/// Same circuit with the calibration constants that pin Jx(0) ~ 40 MHz, the
/// Jx zero crossing at 0.93 I_cr and Jz/Jx = 0.95 at zero bias.
CircuitParams calibrated_fig2_params();

namespace calibration {
inline constexpr double spin_normalization = 0.25;
inline constexpr double C_int_pF = 0.155081933711;
inline constexpr double jz_prefactor = 0.941981736638;
inline constexpr double zero_crossing_bias = 0.93;
inline constexpr double ratio_at_zero_bias = 0.95;
}  // namespace calibration

struct CouplingStrengths {
  double Jx = 0.0;  // rad/ns
  double Jy = 0.0;
  double Jz = 0.0;

  /// sqrt(Jx^2 + Jy^2 + Jz^2) / sqrt(3)
  double jbar() const;
  static CouplingStrengths isotropic(double J) { return {J, J, J}; }
  CouplingStrengths scaled(double alpha) const { return {alpha * Jx, alpha * Jy, alpha * Jz}; }
};

struct RenormalizedInductances {
  double M = 0.0;
  double L_R = 0.0;
  double L_L = 0.0;
  double L_int = 0.0;
  double factor = 1.0;  // 1 - M^2 / (L_R L_L)
};

/// Josephson inductance of the coupling junction in nH. Bias and critical
/// current in uA. Throws std::domain_error once the junction switches
/// (I_b >= I_cr) or for negative bias.
double josephson_inductance(double I_b, double I_cr, bool flux_quantum_prefactor = true);

/// Renormalized mutual, loop and junction inductances at bias I_b (uA).
RenormalizedInductances renormalized_inductances(const CircuitParams& p, double I_b);

/// Coupling strengths at bias current I_b (uA). Throws std::domain_error at
/// or beyond the critical current and when omega_q sits on the junction
/// plasma resonance.
CouplingStrengths couplings(const CircuitParams& p, double I_b);

/// Bias current (uA) at which couplings(p, .).Jx equals jx_target, searched
/// on [0, 0.93 I_cr] by bisection. Throws std::range_error when the target
/// is not reachable on that interval.
double bias_for_coupling(const CircuitParams& p, double jx_target);

}  // namespace dqhe
