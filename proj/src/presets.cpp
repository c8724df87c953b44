#include <chrono>
#include <functional>
#include <map>

#include "dqhe/experiments.hpp"

namespace dqhe {

namespace {

std::vector<double> grid(double start, double stop, double step) {
  const int count = static_cast<int>(std::lround((stop - start) / step)) + 1;
  return ScanConfig::linspace(start, stop, count);
}

RunConfig base(int n, FieldRule rule, double t_ramp, std::uint64_t seed) {
  RunConfig c;
  c.chain.n = n;
  c.ramp = RampProtocol::from_ramp_time(t_ramp, rule);
  c.disorder.base_seed = seed;
  return c;
}

RunConfig bias_scan(RunConfig c, std::vector<double> values, bool isotropic_proxy = false) {
  c.chain.mode = ChainMode::Circuit;
  c.chain.isotropic_proxy = isotropic_proxy;
  c.scan.axis = ScanAxis::Bias;
  c.scan.values = std::move(values);
  return c;
}

RunConfig jbar_scan(RunConfig c, std::vector<double> values) {
  c.chain.mode = ChainMode::Direct;
  c.scan.axis = ScanAxis::JbarOverH;
  c.scan.values = std::move(values);
  return c;
}

ConstantField field_mhz(double mhz) { return ConstantField{units::mhz_to_rad_per_ns(mhz)}; }

struct Output {
  std::vector<std::string> files;
  nlohmann::json configs = nlohmann::json::object();
};

void emit(Output& out, const std::filesystem::path& dir, const std::string& name, const Table& t,
          const RunConfig* cfg) {
  t.write(dir / name);
  out.files.push_back(name);
  if (cfg) out.configs[name] = cfg->to_json();
}

void fig2(const std::filesystem::path& dir, std::uint64_t, const RunOptions&, Output& out) {
  const CircuitParams p = calibrated_fig2_params();
  const auto rows = couplings_scan(p, grid(0.0, 0.93, 0.01));
  emit(out, dir, "fig2_couplings.csv", couplings_table(rows), nullptr);
  RunConfig c;
  out.configs["fig2_couplings.csv"] = c.to_json()["circuit"];
}

void fig4a(const std::filesystem::path& dir, std::uint64_t seed, const RunOptions& opts, Output& out) {
  const RunConfig aniso = bias_scan(base(2, field_mhz(76.0), 100.0, seed), grid(0.0, 0.9, 0.01));
  const RunConfig iso = bias_scan(aniso, aniso.scan.values, true);
  const auto a = run_scan(aniso, opts);
  const auto b = run_scan(iso, opts);
  Table closed;
  closed.columns = {"I_b_over_Icr", "Jbar_over_h", "F_anisotropic", "F_isotropic"};
  for (std::size_t i = 0; i < a.size(); ++i) closed.add({a[i].control, a[i].jbar_over_h, a[i].F, b[i].F});
  emit(out, dir, "fig4a_closed.csv", closed, &aniso);

  struct Variant {
    const char* column;
    double T1, T2, t_ramp;
  };
  const Variant variants[] = {{"F_open_T1_658ns_tramp_10ns", 658.0, 812.0, 10.0},
                              {"F_open_T1_658ns_tramp_100ns", 658.0, 812.0, 100.0},
                              {"F_open_T1_1500ns_tramp_10ns", 1500.0, 3000.0, 10.0}};
  std::vector<std::vector<ScanRow>> results;
  for (const auto& v : variants) {
    RunConfig c = bias_scan(base(2, field_mhz(76.0), v.t_ramp, seed), grid(0.0, 0.9, 0.05));
    c.decoherence_enabled = true;
    c.decoherence.T1 = v.T1;
    c.decoherence.T2 = v.T2;
    c.ramp.t_meas = 10.0;
    results.push_back(run_scan(c, opts));
  }
  Table open;
  open.columns = {"I_b_over_Icr", "Jbar_over_h", "F_closed_tramp_10ns", "F_closed_tramp_100ns"};
  for (const auto& v : variants) open.columns.push_back(v.column);
  for (std::size_t i = 0; i < results[0].size(); ++i) {
    std::vector<double> row = {results[0][i].control, results[0][i].jbar_over_h, results[0][i].F, results[1][i].F};
    for (const auto& r : results) row.push_back(*r[i].F_open);
    open.add(std::move(row));
  }
  emit(out, dir, "fig4a_open.csv", open, nullptr);
}

// Panels b-e: F against Jbar/h (isotropic, direct) and against the bias
// current (circuit couplings).
void staircase(const std::string& tag, int n, FieldRule rule, double bias_max, const std::filesystem::path& dir,
               std::uint64_t seed, const RunOptions& opts, Output& out) {
  const RunConfig direct = jbar_scan(base(n, rule, 100.0, seed), grid(0.02, 1.5, 0.02));
  emit(out, dir, tag + "_jbar.csv", scan_table(direct, run_scan(direct, opts)), &direct);
  const RunConfig circuit = bias_scan(base(n, rule, 100.0, seed), grid(0.0, bias_max, 0.01));
  emit(out, dir, tag + "_bias.csv", scan_table(circuit, run_scan(circuit, opts)), &circuit);
}

void fig5(const std::filesystem::path& dir, std::uint64_t seed, const RunOptions& opts, Output& out) {
  RunConfig c = base(2, field_mhz(76.0), 100.0, seed);
  c.chain.jbar_over_h = 0.4;
  c.scan.axis = ScanAxis::RampTime;
  c.scan.values = grid(1.0, 200.0, 1.0);
  emit(out, dir, "fig5_tramp.csv", scan_table(c, run_scan(c, opts)), &c);
}

void fig6(const std::filesystem::path& dir, std::uint64_t seed, const RunOptions& opts, Output& out, bool with_gap) {
  const auto values = grid(0.0, 0.9, 0.02);
  Table t;
  t.columns = {"I_b_over_Icr", "Jbar_over_h", "eta", "samples", "failures", "F_mean", "F_stderr", "Ch_mean",
               "Ch_stderr"};
  RunConfig c = bias_scan(base(2, field_mhz(76.0), 100.0, seed), values);
  c.disorder.samples = 500;
  for (double eta : {0.0, 0.05, 0.07, 0.10}) {
    c.disorder.eta = eta;
    for (const auto& r : disorder_averaged_curve(c, opts))
      t.add({r.control, r.jbar_over_h, r.eta, static_cast<double>(r.samples), static_cast<double>(r.failures),
             r.F_mean, r.F_stderr, r.Ch_mean, r.Ch_stderr});
  }
  emit(out, dir, with_gap ? "fig6b_chern.csv" : "fig6a_disorder.csv", t, &c);
  if (with_gap) emit(out, dir, "fig6b_gap.csv", gap_table(c, gap_scan(c)), &c);
}

using PresetFn = std::function<void(const std::filesystem::path&, std::uint64_t, const RunOptions&, Output&)>;

const std::map<std::string, PresetFn>& presets() {
  static const std::map<std::string, PresetFn> table = {
      {"fig2", fig2},
      {"fig4a", fig4a},
      {"fig4b",
       [](const auto& d, auto s, const auto& o, auto& out) { staircase("fig4b", 4, field_mhz(49.0), 0.54, d, s, o, out); }},
      {"fig4c",
       [](const auto& d, auto s, const auto& o, auto& out) { staircase("fig4c", 4, LinearFieldRule{}, 0.9, d, s, o, out); }},
      {"fig4d",
       [](const auto& d, auto s, const auto& o, auto& out) { staircase("fig4d", 6, field_mhz(36.0), 0.54, d, s, o, out); }},
      {"fig4e",
       [](const auto& d, auto s, const auto& o, auto& out) { staircase("fig4e", 6, LinearFieldRule{}, 0.9, d, s, o, out); }},
      {"fig5", fig5},
      {"fig6a", [](const auto& d, auto s, const auto& o, auto& out) { fig6(d, s, o, out, false); }},
      {"fig6b", [](const auto& d, auto s, const auto& o, auto& out) { fig6(d, s, o, out, true); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : presets()) names.push_back(name);
  return names;
}

std::vector<std::string> run_preset(const std::string& name, const std::filesystem::path& out_dir,
                                    std::uint64_t seed, const RunOptions& opts) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw std::invalid_argument("unknown preset '" + name + "'");
  const auto start = std::chrono::steady_clock::now();
  Output out;
  it->second(out_dir, seed, opts, out);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(out_dir, "preset " + name, out.configs, seed, wall, out.files);
  return out.files;
}

}  // namespace dqhe
