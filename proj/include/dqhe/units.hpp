#pragma once

#include <numbers>

// Internal units: hbar = 1, time in ns, energies as angular frequencies in rad/ns.
// Frequencies quoted in MHz/GHz are ordinary frequencies nu; omega = 2*pi*nu.
namespace dqhe::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double mhz_to_rad_per_ns(double nu_mhz) { return two_pi * nu_mhz * 1e-3; }
inline constexpr double rad_per_ns_to_mhz(double omega) { return omega * 1e3 / two_pi; }
inline constexpr double ghz_to_rad_per_ns(double nu_ghz) { return two_pi * nu_ghz; }

inline constexpr double flux_quantum = 2.067833848e-15;  // Wb
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double k_boltzmann = 1.380649e-23;       // J/K

}  // namespace dqhe::units
