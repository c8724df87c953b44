#pragma once

// Run configuration: an INI-style file with sections chain, circuit, ramp,
// decoherence, disorder, scan, integrator and output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqhe/circuit.hpp"
#include "dqhe/integrator.hpp"
#include "dqhe/lindblad.hpp"
#include "dqhe/schedule.hpp"

namespace dqhe {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ChainMode { Direct, Circuit };

struct ChainConfig {
  int n = 2;
  ChainMode mode = ChainMode::Direct;
  // Direct mode: explicit couplings in MHz (ordinary frequency).
  double Jx_MHz = 0.0;
  double Jy_MHz = 0.0;
  double Jz_MHz = 0.0;
  // Direct mode alternative: isotropic J = jbar_over_h * h.
  std::optional<double> jbar_over_h;
  // Circuit mode.
  double bias_over_critical = 0.0;
  bool isotropic_proxy = false;
};

enum class ScanAxis { None, Bias, JbarOverH, RampTime, Theta };

struct ScanConfig {
  ScanAxis axis = ScanAxis::None;
  std::vector<double> values;

  static std::vector<double> linspace(double start, double stop, int count);
};

struct DisorderConfig {
  double eta = 0.0;
  int samples = 500;  // N_alpha
  std::uint64_t base_seed = 1234567;
};

struct RunConfig {
  ChainConfig chain;
  CircuitParams circuit = calibrated_fig2_params();
  RampProtocol ramp = RampProtocol::from_ramp_time(100.0, ConstantField{units::mhz_to_rad_per_ns(76.0)});
  bool decoherence_enabled = false;
  DecoherenceParams decoherence;
  DisorderConfig disorder;
  ScanConfig scan;
  EvolverConfig integrator;
  int chern_grid = 101;
  std::filesystem::path output_dir = "out";

  void validate() const;
  /// Flat key/value view of the resolved configuration.
  nlohmann::json to_json() const;
};

/// Parses an INI-style configuration file. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

}  // namespace dqhe
