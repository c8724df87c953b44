#include "dqhe/circuit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dqhe/units.hpp"

namespace dqhe {

namespace {

constexpr double kResonanceTolerance = 1e-9;

}  // namespace

void CircuitParams::validate() const {
  auto require_positive = [](double value, const char* name) {
    if (!(value > 0.0)) {
      throw std::invalid_argument(std::string("circuit parameter ") + name + " must be positive");
    }
  };
  require_positive(qubit_frequency_ghz, "qubit_frequency_ghz");
  require_positive(C_j, "C_j");
  require_positive(C_jp1, "C_jp1");
  require_positive(C_int, "C_int");
  require_positive(L_R, "L_R");
  require_positive(L_L, "L_L");
  require_positive(I_cr, "I_cr");
  require_positive(N1, "N1");
  require_positive(N2, "N2");
  require_positive(spin_normalization, "spin_normalization");
  if (M < 0.0) throw std::invalid_argument("circuit parameter M is a magnitude and must be >= 0");
  if (M * M >= L_R * L_L) {
    throw std::invalid_argument("mutual inductance too large: M^2 must be below L_R * L_L");
  }
}

double CircuitParams::omega_q() const {
  return frequency_convention == FrequencyConvention::Ordinary
             ? units::ghz_to_rad_per_ns(qubit_frequency_ghz)
             : qubit_frequency_ghz;
}

double CircuitParams::jz_coefficient() const {
  return jz_prefactor ? *jz_prefactor : 1.0 / (6.0 * std::sqrt(N1 * N2));
}

CircuitParams literal_fig2_params() { return CircuitParams{}; }

CircuitParams calibrated_fig2_params() {
  CircuitParams p;
  p.C_int = calibration::C_int_pF;
  p.spin_normalization = calibration::spin_normalization;
  p.jz_prefactor = calibration::jz_prefactor;
  return p;
}

double CouplingStrengths::jbar() const {
  return std::sqrt((Jx * Jx + Jy * Jy + Jz * Jz) / 3.0);
}

double josephson_inductance(double I_b, double I_cr, bool flux_quantum_prefactor) {
  if (I_b < 0.0) throw std::domain_error("bias current must be non-negative");
  if (I_b >= I_cr) {
    throw std::domain_error("junction switched: bias current " + std::to_string(I_b) +
                            " uA >= critical current " + std::to_string(I_cr) + " uA");
  }
  const double root = std::sqrt(I_cr * I_cr - I_b * I_b);
  if (!flux_quantum_prefactor) return 1.0 / root;
  // Phi0 / (2 pi) in Wb over uA gives H; report nH.
  return units::flux_quantum / units::two_pi / (root * 1e-6) * 1e9;
}

RenormalizedInductances renormalized_inductances(const CircuitParams& p, double I_b) {
  RenormalizedInductances r;
  r.factor = 1.0 - p.M * p.M / (p.L_R * p.L_L);
  r.M = p.M * r.factor;
  r.L_R = p.L_R * r.factor;
  r.L_L = p.L_L * r.factor;
  const double L_int = josephson_inductance(I_b, p.I_cr, p.flux_quantum_prefactor);
  r.L_int = L_int * (1.0 + p.M / p.L_R) * (1.0 + p.M / p.L_L);
  return r;
}

CouplingStrengths couplings(const CircuitParams& p, double I_b) {
  p.validate();
  const auto r = renormalized_inductances(p, I_b);
  const double L_int = josephson_inductance(I_b, p.I_cr, p.flux_quantum_prefactor);
  const double omega_q = p.omega_q();

  // (omega_q / omega_int)^2 = omega_q^2 L_int C_int; rad^2/ns^2 * nH * pF = 1e-3.
  const double detuning_ratio = omega_q * omega_q * L_int * p.C_int * 1e-3;
  const double resonance = 1.0 - detuning_ratio;
  if (std::abs(resonance) < kResonanceTolerance) {
    throw std::domain_error("qubit frequency on the coupling-junction plasma resonance");
  }

  // Denominator L_R L_L omega_q sqrt(C_j C_j+1): nH^2 * rad/ns * pF = 1e-21 s -> per ns.
  const double denominator = r.L_R * r.L_L * omega_q * std::sqrt(p.C_j * p.C_jp1) * 1e-21;
  const double to_rad_per_ns = 1e-9 * 1e-9;  // nH numerator -> H, 1/s -> 1/ns
  const double jx = (r.M - r.L_int / resonance) * to_rad_per_ns / denominator;
  const double jz = p.jz_coefficient() * (r.M - r.L_int) * to_rad_per_ns / denominator;

  CouplingStrengths c;
  c.Jx = p.spin_normalization * jx;
  c.Jy = c.Jx;
  c.Jz = p.spin_normalization * jz;
  return c;
}

double bias_for_coupling(const CircuitParams& p, double jx_target) {
  double lo = 0.0;
  double hi = 0.93 * p.I_cr;
  const double j_lo = couplings(p, lo).Jx;
  const double j_hi = couplings(p, hi).Jx;
  const double slack = 1e-9 * std::max(std::abs(j_lo), std::abs(j_hi));
  const double j_max = std::max(j_lo, j_hi);
  const double j_min = std::min(j_lo, j_hi);
  if (jx_target > j_max + slack || jx_target < j_min - slack) {
    throw std::range_error("coupling target outside the range reachable on [0, 0.93 I_cr]");
  }
  const bool decreasing = j_lo > j_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * p.I_cr; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double j = couplings(p, mid).Jx;
    if ((j > jx_target) == decreasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dqhe
