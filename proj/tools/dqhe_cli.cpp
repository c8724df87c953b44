#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dqhe/config.hpp"
#include "dqhe/experiments.hpp"

namespace {

struct GlobalOptions {
  std::string config;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

dqhe::RunConfig load(const GlobalOptions& g) {
  dqhe::RunConfig cfg = g.config.empty() ? dqhe::RunConfig{} : dqhe::load_config(g.config);
  if (!g.out.empty()) cfg.output_dir = g.out;
  if (g.seed) cfg.disorder.base_seed = *g.seed;
  cfg.validate();
  return cfg;
}

class Run {
 public:
  Run(const dqhe::RunConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void write(const std::string& name, const dqhe::Table& table) {
    table.write(cfg_.output_dir / name);
    files_.push_back(name);
    std::cout << (cfg_.output_dir / name).string() << '\n';
  }

  void finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    dqhe::write_manifest(cfg_.output_dir, command_, cfg_.to_json(), cfg_.disorder.base_seed, wall, files_);
  }

 private:
  const dqhe::RunConfig& cfg_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> files_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical quantum Hall response of coupled phase-qubit chains"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory (overrides output.dir)");
  app.add_option("--threads", g.threads, "worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "base seed for disorder sampling (overrides disorder.base_seed)");

  auto* couplings = app.add_subcommand("couplings-scan", "circuit couplings against bias current");
  auto* ramp = app.add_subcommand("ramp", "single ramp at the base point of the configuration");
  auto* scan = app.add_subcommand("scan", "F at the end of the ramp along the scan axis");
  auto* chern = app.add_subcommand("chern", "Chern number along the scan axis");
  auto* disorder = app.add_subcommand("disorder", "disorder-averaged F and Chern number");
  auto* gap = app.add_subcommand("gap-scan", "ground-state gap at theta = 0 along the scan axis");
  auto* preset = app.add_subcommand("preset", "figure data presets");
  std::string preset_name;
  preset->add_option("name", preset_name, "preset name")
      ->required()
      ->check(CLI::IsMember(dqhe::preset_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    const dqhe::RunOptions opts{g.threads};
    if (preset->parsed()) {
      const std::filesystem::path dir = g.out.empty() ? std::filesystem::path("out") / preset_name : std::filesystem::path(g.out);
      for (const auto& f : dqhe::run_preset(preset_name, dir, g.seed.value_or(1234567), opts))
        std::cout << (dir / f).string() << '\n';
      return 0;
    }

    const dqhe::RunConfig cfg = load(g);
    if (couplings->parsed()) {
      Run run(cfg, "couplings-scan");
      std::vector<double> bias = cfg.scan.axis == dqhe::ScanAxis::Bias
                                     ? cfg.scan.values
                                     : dqhe::ScanConfig::linspace(0.0, 0.93, 94);
      run.write("couplings.csv", dqhe::couplings_table(dqhe::couplings_scan(cfg.circuit, bias)));
      run.finish();
    } else if (ramp->parsed()) {
      dqhe::RunConfig single = cfg;
      single.scan = {};
      Run run(single, "ramp");
      const auto rows = dqhe::run_scan(single, opts);
      run.write("ramp.csv", dqhe::scan_table(single, rows));
      run.finish();
      std::cout << "F = " << rows.front().F;
      if (rows.front().F_open) std::cout << "  F_open = " << *rows.front().F_open;
      std::cout << '\n';
    } else if (scan->parsed()) {
      Run run(cfg, "scan");
      run.write("scan.csv", dqhe::scan_table(cfg, dqhe::run_scan(cfg, opts)));
      run.finish();
    } else if (chern->parsed()) {
      Run run(cfg, "chern");
      const auto rows = dqhe::run_chern(cfg, opts);
      run.write("chern.csv", dqhe::chern_table(cfg, rows));
      run.write("chern_curves.csv", dqhe::chern_curve_table(cfg, rows));
      run.finish();
    } else if (disorder->parsed()) {
      Run run(cfg, "disorder");
      run.write("disorder.csv", dqhe::disorder_table(cfg, dqhe::disorder_averaged_curve(cfg, opts)));
      run.finish();
    } else if (gap->parsed()) {
      Run run(cfg, "gap-scan");
      run.write("gap.csv", dqhe::gap_table(cfg, dqhe::gap_scan(cfg)));
      run.finish();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
