#include "dqhe/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <omp.h>

#include "dqhe/lindblad.hpp"
#include "dqhe/probes.hpp"
#include "dqhe/unitary.hpp"

namespace dqhe {

namespace {

int thread_count(const RunOptions& opts) { return opts.threads > 0 ? opts.threads : omp_get_max_threads(); }

// Runs body(i) for i in [0, n) on the OpenMP pool. The first exception (by
// index) is rethrown after the loop so error reporting does not depend on
// scheduling.
template <typename Body>
void parallel_for(std::size_t n, const RunOptions& opts, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(opts))
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

[[noreturn]] void rethrow_at(const std::exception& e, const char* what, double control) {
  std::ostringstream ss;
  ss << what << " failed at control value " << control << ": " << e.what();
  throw std::runtime_error(ss.str());
}

double jbar_of(const CouplingStrengths& b) { return b.jbar(); }

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

// Closed-system trajectory to theta = pi observing F on the Chern grid and at
// theta_final; returns {Ch, F(theta_final), grid, F values}.
ChernRow chern_trajectory(const PointSetup& s, const EvolverConfig& ic, int grid_size, double theta_measure) {
  RampProtocol p = s.protocol;
  p.theta_final = units::pi;
  p.t_meas = 0.0;
  std::vector<double> grid = chern_grid(grid_size);
  std::vector<double> observe(grid.begin() + 1, grid.end() - 1);
  observe.push_back(theta_measure);
  const TrajectoryResult traj = evolve(s.chain, p, ic, observe);

  std::vector<double> F(grid.size(), 0.0);
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const auto& o = traj.samples[k - 1];
    F[k] = berry_curvature(o.sigma_y, o.h, o.theta, o.v_theta).F_theta_phi;
  }
  const auto& m = traj.samples.back();
  ChernRow row;
  row.control = s.control;
  row.jbar_over_h = s.jbar / s.h;
  row.F_at_theta_final = theta_measure >= units::pi ? 0.0 : berry_curvature(m.sigma_y, m.h, m.theta, m.v_theta).F_theta_phi;
  const ChernResult ch = chern_from_samples(grid, F);
  row.Ch = ch.Ch;
  row.theta = std::move(grid);
  row.F = std::move(F);
  return row;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::vector<std::optional<double>> scan_controls(const RunConfig& cfg) {
  if (cfg.scan.axis == ScanAxis::None) return {std::nullopt};
  return {cfg.scan.values.begin(), cfg.scan.values.end()};
}

PointSetup resolve_point(const RunConfig& cfg, std::optional<double> control) {
  const auto& ch = cfg.chain;
  PointSetup s;
  s.control = control.value_or(0.0);
  s.protocol = cfg.ramp;
  s.bias_over_critical = std::numeric_limits<double>::quiet_NaN();

  if (control && cfg.scan.axis == ScanAxis::RampTime) s.protocol.v = units::pi / *control;
  if (control && cfg.scan.axis == ScanAxis::Theta) s.protocol.theta_final = *control;

  CouplingStrengths bond;
  if (ch.mode == ChainMode::Circuit) {
    double x = ch.bias_over_critical;
    if (control && cfg.scan.axis == ScanAxis::Bias) x = *control;
    s.bias_over_critical = x;
    bond = couplings(cfg.circuit, x * cfg.circuit.I_cr);
    if (ch.isotropic_proxy) bond = CouplingStrengths::isotropic(bond.jbar());
    s.h = field_amplitude(s.protocol.field_rule, bond.jbar());
  } else {
    std::optional<double> ratio = ch.jbar_over_h;
    if (control && cfg.scan.axis == ScanAxis::JbarOverH) ratio = *control;
    if (ratio) {
      if (auto* c = std::get_if<ConstantField>(&s.protocol.field_rule)) {
        s.h = c->h;
      } else {
        const auto& r = std::get<LinearFieldRule>(s.protocol.field_rule);
        const double denom = 1.0 - r.a * *ratio;
        if (!(denom > 0.0)) throw std::domain_error("field rule has no positive solution at this Jbar/h");
        s.h = units::mhz_to_rad_per_ns(r.b / denom);
      }
      bond = CouplingStrengths::isotropic(*ratio * s.h);
    } else {
      bond = {units::mhz_to_rad_per_ns(ch.Jx_MHz), units::mhz_to_rad_per_ns(ch.Jy_MHz),
              units::mhz_to_rad_per_ns(ch.Jz_MHz)};
      s.h = field_amplitude(s.protocol.field_rule, bond.jbar());
    }
  }
  s.protocol.field_rule = ConstantField{s.h};
  s.chain = SpinChainSpec::uniform(ch.n, bond);
  s.jbar = ch.n > 1 ? jbar_of(bond) : 0.0;
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t point_seed(std::uint64_t base_seed, std::uint64_t point) {
  return splitmix64(splitmix64(base_seed) ^ point);
}

DisorderSample sample_disorder(double eta, std::uint64_t seed, std::uint64_t index) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
  // 53-bit uniform on [0, 1); avoids implementation-defined distributions
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  DisorderSample s;
  s.alpha1 = 1.0 + eta * (2.0 * uniform() - 1.0);
  s.alpha2 = 1.0 + eta * (2.0 * uniform() - 1.0);
  return s;
}

PointSetup apply_disorder(PointSetup setup, const DisorderSample& s) {
  for (auto& b : setup.chain.bonds) b = b.scaled(s.alpha1);
  setup.protocol.field_scale *= s.alpha2;
  return setup;
}

std::vector<ScanRow> run_scan(const RunConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto controls = scan_controls(cfg);
  std::vector<ScanRow> rows(controls.size());
  std::optional<Dissipator> dissipator;
  if (cfg.decoherence_enabled) dissipator.emplace(cfg.chain.n, cfg.decoherence);

  parallel_for(controls.size(), opts, [&](std::size_t i) {
    const PointSetup s = resolve_point(cfg, controls[i]);
    try {
      const TrajectoryResult traj = evolve(s.chain, s.protocol, cfg.integrator);
      const ProbeResult probe = berry_curvature_dynamical(traj);
      ScanRow& r = rows[i];
      r.control = s.control;
      r.bias_over_critical = s.bias_over_critical;
      r.jbar_over_h = s.jbar / s.h;
      r.h_MHz = units::rad_per_ns_to_mhz(s.h);
      const CouplingStrengths b = s.chain.bonds.empty() ? CouplingStrengths{} : s.chain.bonds.front();
      r.Jx_MHz = units::rad_per_ns_to_mhz(b.Jx);
      r.Jy_MHz = units::rad_per_ns_to_mhz(b.Jy);
      r.Jz_MHz = units::rad_per_ns_to_mhz(b.Jz);
      r.t_ramp_ns = s.protocol.ramp_time();
      r.theta = probe.theta_measured;
      r.v_theta = probe.v_theta_at_measure;
      r.M_theta = probe.M_theta;
      r.F = probe.F_theta_phi;
      r.max_norm_error = traj.max_norm_error;
      if (dissipator) {
        const OpenTrajectoryResult open = evolve_open(s.chain, s.protocol, *dissipator, cfg.integrator);
        r.F_open = berry_curvature_dynamical(open).F_theta_phi;
      }
    } catch (const std::exception& e) {
      rethrow_at(e, "scan", s.control);
    }
  });
  return rows;
}

std::vector<ChernRow> run_chern(const RunConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto controls = scan_controls(cfg);
  std::vector<ChernRow> rows(controls.size());
  parallel_for(controls.size(), opts, [&](std::size_t i) {
    const PointSetup s = resolve_point(cfg, controls[i]);
    try {
      rows[i] = chern_trajectory(s, cfg.integrator, cfg.chern_grid, s.protocol.theta_final);
    } catch (const std::exception& e) {
      rethrow_at(e, "chern", s.control);
    }
  });
  return rows;
}

std::vector<AveragedRow> disorder_averaged_curve(const RunConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto controls = scan_controls(cfg);
  const std::size_t samples = static_cast<std::size_t>(cfg.disorder.eta == 0.0 ? 1 : cfg.disorder.samples);
  const std::size_t tasks = controls.size() * samples;

  struct Outcome {
    bool ok = false;
    double F = 0.0;
    double Ch = 0.0;
  };
  std::vector<PointSetup> setups(controls.size());
  for (std::size_t p = 0; p < controls.size(); ++p) setups[p] = resolve_point(cfg, controls[p]);

  std::vector<Outcome> outcomes(tasks);
  const long count = static_cast<long>(tasks);
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(opts))
  for (long task = 0; task < count; ++task) {
    const std::size_t p = static_cast<std::size_t>(task) / samples;
    const std::size_t k = static_cast<std::size_t>(task) % samples;
    try {
      const DisorderSample d = sample_disorder(cfg.disorder.eta, point_seed(cfg.disorder.base_seed, p), k);
      const ChernRow r = chern_trajectory(apply_disorder(setups[p], d), cfg.integrator, cfg.chern_grid,
                                          setups[p].protocol.theta_final);
      if (std::isfinite(r.F_at_theta_final) && std::isfinite(r.Ch))
        outcomes[static_cast<std::size_t>(task)] = {true, r.F_at_theta_final, r.Ch};
    } catch (...) {
      outcomes[static_cast<std::size_t>(task)] = {};
    }
  }

  std::vector<AveragedRow> rows(controls.size());
  for (std::size_t p = 0; p < controls.size(); ++p) {
    std::vector<double> F, Ch;
    for (std::size_t k = 0; k < samples; ++k) {
      const Outcome& o = outcomes[p * samples + k];
      if (!o.ok) continue;
      F.push_back(o.F);
      Ch.push_back(o.Ch);
    }
    AveragedRow& r = rows[p];
    r.control = setups[p].control;
    r.jbar_over_h = setups[p].jbar / setups[p].h;
    r.eta = cfg.disorder.eta;
    r.samples = static_cast<int>(F.size());
    r.failures = static_cast<int>(samples - F.size());
    if (static_cast<double>(r.failures) > 0.01 * static_cast<double>(samples)) {
      std::ostringstream ss;
      ss << r.failures << " of " << samples << " disorder samples failed at control value " << r.control;
      throw DisorderAbort(ss.str());
    }
    r.F_mean = mean(F);
    r.F_stderr = standard_error(F);
    r.Ch_mean = mean(Ch);
    r.Ch_stderr = standard_error(Ch);
  }
  return rows;
}

std::vector<GapRow> gap_scan(const RunConfig& cfg) {
  cfg.validate();
  std::vector<GapRow> rows;
  for (const auto& c : scan_controls(cfg)) {
    const PointSetup s = resolve_point(cfg, c);
    const ChainOperators ops(s.chain.n, s.chain.bonds);
    const Spectrum spec = diagonalize(ops.hamiltonian(MagneticField{s.h, 0.0, s.protocol.phi}));
    rows.push_back({s.control, s.jbar / s.h, units::rad_per_ns_to_mhz(spec.gap())});
  }
  return rows;
}

std::vector<CouplingRow> couplings_scan(const CircuitParams& params, std::span<const double> bias_over_critical) {
  std::vector<CouplingRow> rows;
  rows.reserve(bias_over_critical.size());
  for (double x : bias_over_critical) {
    const CouplingStrengths c = couplings(params, x * params.I_cr);
    CouplingRow r;
    r.bias_over_critical = x;
    r.Jx_MHz = units::rad_per_ns_to_mhz(c.Jx);
    r.Jy_MHz = units::rad_per_ns_to_mhz(c.Jy);
    r.Jz_MHz = units::rad_per_ns_to_mhz(c.Jz);
    r.Jbar_MHz = units::rad_per_ns_to_mhz(c.jbar());
    r.Jz_over_Jx = c.Jz / c.Jx;
    rows.push_back(r);
  }
  return rows;
}

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += '\n';
  }
  return out;
}

void Table::write(const std::filesystem::path& path) const {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_csv();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string control_column(const RunConfig& cfg) {
  switch (cfg.scan.axis) {
    case ScanAxis::Bias: return "I_b_over_Icr";
    case ScanAxis::JbarOverH: return "Jbar_over_h";
    case ScanAxis::RampTime: return "t_ramp_ns";
    case ScanAxis::Theta: return "theta_rad";
    case ScanAxis::None: break;
  }
  return cfg.chain.mode == ChainMode::Circuit ? "I_b_over_Icr" : "Jbar_over_h";
}

namespace {

double control_value(const RunConfig& cfg, double control, double bias, double jbar_over_h) {
  if (cfg.scan.axis != ScanAxis::None) return control;
  return cfg.chain.mode == ChainMode::Circuit ? bias : jbar_over_h;
}

}  // namespace

Table scan_table(const RunConfig& cfg, const std::vector<ScanRow>& rows) {
  const std::string control = control_column(cfg);
  const std::vector<std::string> names = {"Jbar_over_h", "h_MHz", "Jx_MHz", "Jy_MHz", "Jz_MHz",
                                          "t_ramp_ns", "theta_rad", "v_theta_rad_per_ns", "M_theta_rad_per_ns", "F"};
  const bool open = cfg.decoherence_enabled;
  Table t;
  t.columns = {control};
  for (const auto& n : names)
    if (n != control) t.columns.push_back(n);
  if (open) t.columns.push_back("F_open");
  for (const auto& r : rows) {
    const std::vector<double> values = {r.jbar_over_h, r.h_MHz, r.Jx_MHz, r.Jy_MHz, r.Jz_MHz,
                                        r.t_ramp_ns, r.theta, r.v_theta, r.M_theta, r.F};
    std::vector<double> row = {control_value(cfg, r.control, r.bias_over_critical, r.jbar_over_h)};
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] != control) row.push_back(values[k]);
    if (open) row.push_back(r.F_open.value_or(std::numeric_limits<double>::quiet_NaN()));
    t.add(std::move(row));
  }
  return t;
}

Table chern_table(const RunConfig& cfg, const std::vector<ChernRow>& rows) {
  Table t;
  t.columns = {control_column(cfg), "Jbar_over_h", "F", "Ch"};
  for (const auto& r : rows)
    t.add({control_value(cfg, r.control, cfg.chain.bias_over_critical, r.jbar_over_h), r.jbar_over_h,
           r.F_at_theta_final, r.Ch});
  return t;
}

Table chern_curve_table(const RunConfig& cfg, const std::vector<ChernRow>& rows) {
  Table t;
  t.columns = {control_column(cfg), "theta_rad", "F_theta", "Ch"};
  for (const auto& r : rows)
    for (std::size_t k = 0; k < r.theta.size(); ++k)
      t.add({control_value(cfg, r.control, cfg.chain.bias_over_critical, r.jbar_over_h), r.theta[k], r.F[k], r.Ch});
  return t;
}

Table disorder_table(const RunConfig& cfg, const std::vector<AveragedRow>& rows) {
  Table t;
  t.columns = {control_column(cfg), "Jbar_over_h", "eta", "samples", "failures",
               "F_mean", "F_stderr", "Ch_mean", "Ch_stderr"};
  for (const auto& r : rows)
    t.add({control_value(cfg, r.control, cfg.chain.bias_over_critical, r.jbar_over_h), r.jbar_over_h, r.eta,
           static_cast<double>(r.samples), static_cast<double>(r.failures), r.F_mean, r.F_stderr, r.Ch_mean,
           r.Ch_stderr});
  return t;
}

Table gap_table(const RunConfig& cfg, const std::vector<GapRow>& rows) {
  Table t;
  t.columns = {control_column(cfg), "Jbar_over_h", "gap_MHz"};
  for (const auto& r : rows)
    t.add({control_value(cfg, r.control, cfg.chain.bias_over_critical, r.jbar_over_h), r.jbar_over_h, r.gap_MHz});
  return t;
}

Table couplings_table(const std::vector<CouplingRow>& rows) {
  Table t;
  t.columns = {"I_b_over_Icr", "Jx_MHz", "Jy_MHz", "Jz_MHz", "Jbar_MHz", "Jz_over_Jx"};
  for (const auto& r : rows) t.add({r.bias_over_critical, r.Jx_MHz, r.Jy_MHz, r.Jz_MHz, r.Jbar_MHz, r.Jz_over_Jx});
  return t;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    std::uint64_t seed, double wall_seconds, const std::vector<std::string>& files) {
  nlohmann::json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["wall_time_s"] = wall_seconds;
  m["files"] = files;
  m["config"] = config;
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << m.dump(2) << '\n';
}

}  // namespace dqhe
