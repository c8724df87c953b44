#pragma once

// Sweep orchestration: per-point chain resolution, quenched disorder,
// parallel scans, CSV tables and run manifests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqhe/config.hpp"
#include "dqhe/spin_chain.hpp"

namespace dqhe {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  int threads = 0;  // 0: OpenMP default
};

/// Chain and protocol of one scan point; the chain's own field is unused.
struct PointSetup {
  double control = 0.0;
  SpinChainSpec chain;
  RampProtocol protocol;
  double bias_over_critical = 0.0;  // NaN in direct mode
  double h = 0.0;                   // nominal field, rad/ns
  double jbar = 0.0;                // rad/ns
};

/// Resolves the configuration at one value of its scan axis (or at the base
/// point when control is empty). The field rule is evaluated once and frozen
/// into a constant field.
PointSetup resolve_point(const RunConfig& cfg, std::optional<double> control);

/// Scan values of the configuration, or a single empty control.
std::vector<std::optional<double>> scan_controls(const RunConfig& cfg);

struct DisorderSample {
  double alpha1 = 1.0;  // couplings
  double alpha2 = 1.0;  // field
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of one scan point, derived from the run's base seed.
std::uint64_t point_seed(std::uint64_t base_seed, std::uint64_t point);
/// Uniform draw on [1 - eta, 1 + eta]^2, a pure function of (seed, index).
DisorderSample sample_disorder(double eta, std::uint64_t seed, std::uint64_t index);
PointSetup apply_disorder(PointSetup setup, const DisorderSample& s);

struct ScanRow {
  double control = 0.0;
  double bias_over_critical = 0.0;
  double jbar_over_h = 0.0;
  double h_MHz = 0.0;
  double Jx_MHz = 0.0, Jy_MHz = 0.0, Jz_MHz = 0.0;
  double t_ramp_ns = 0.0;
  double theta = 0.0;
  double v_theta = 0.0;
  double M_theta = 0.0;
  double F = 0.0;
  std::optional<double> F_open;
  double max_norm_error = 0.0;
};

/// Closed-system F at the end of the ramp for every scan point, plus the
/// open-system value after the measurement window when decoherence is on.
std::vector<ScanRow> run_scan(const RunConfig& cfg, const RunOptions& opts = {});

struct ChernRow {
  double control = 0.0;
  double jbar_over_h = 0.0;
  double Ch = 0.0;
  double F_at_theta_final = 0.0;
  std::vector<double> theta;
  std::vector<double> F;
};

/// Chern number per scan point from one closed-system ramp to theta = pi,
/// sampling F on the uniform Chern grid along the way.
std::vector<ChernRow> run_chern(const RunConfig& cfg, const RunOptions& opts = {});

struct AveragedRow {
  double control = 0.0;
  double jbar_over_h = 0.0;  // nominal
  double eta = 0.0;
  int samples = 0;
  int failures = 0;
  double F_mean = 0.0;
  double F_stderr = 0.0;
  double Ch_mean = 0.0;
  double Ch_stderr = 0.0;
};

class DisorderAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Disorder average of F at theta_final and of Ch over N_alpha quenched
/// realizations per scan point (closed system). Failed samples are excluded
/// and counted; more than 1% failures at any point throws DisorderAbort.
std::vector<AveragedRow> disorder_averaged_curve(const RunConfig& cfg, const RunOptions& opts = {});

struct GapRow {
  double control = 0.0;
  double jbar_over_h = 0.0;
  double gap_MHz = 0.0;
};

/// Ground-state gap of the theta = 0 Hamiltonian per scan point.
std::vector<GapRow> gap_scan(const RunConfig& cfg);

struct CouplingRow {
  double bias_over_critical = 0.0;
  double Jx_MHz = 0.0, Jy_MHz = 0.0, Jz_MHz = 0.0;
  double Jbar_MHz = 0.0;
  double Jz_over_Jx = 0.0;
};

std::vector<CouplingRow> couplings_scan(const CircuitParams& params, std::span<const double> bias_over_critical);

/// Column-named numeric table written as CSV with fixed formatting.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::string to_csv() const;
  /// Throws std::runtime_error with the path on I/O failure.
  void write(const std::filesystem::path& path) const;
};

/// Name of the control column for the configuration's scan axis.
std::string control_column(const RunConfig& cfg);

Table scan_table(const RunConfig& cfg, const std::vector<ScanRow>& rows);
Table chern_table(const RunConfig& cfg, const std::vector<ChernRow>& rows);
/// Long-format F(theta) samples of a Chern scan.
Table chern_curve_table(const RunConfig& cfg, const std::vector<ChernRow>& rows);
Table disorder_table(const RunConfig& cfg, const std::vector<AveragedRow>& rows);
Table gap_table(const RunConfig& cfg, const std::vector<GapRow>& rows);
Table couplings_table(const std::vector<CouplingRow>& rows);

/// Writes manifest.json next to the tables. Wall time is recorded only in the
/// manifest, never in the CSV files.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    std::uint64_t seed, double wall_seconds, const std::vector<std::string>& files);

/// Figure presets.
std::vector<std::string> preset_names();
/// Runs a preset and writes its tables plus manifest into out_dir. Returns the
/// written file names.
std::vector<std::string> run_preset(const std::string& name, const std::filesystem::path& out_dir,
                                    std::uint64_t seed, const RunOptions& opts = {});

}  // namespace dqhe
