#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dqhe/config.hpp"
#include "dqhe/experiments.hpp"

using namespace dqhe;

namespace {

const char* kBaseConfig = R"(
[chain]
N = 2
jbar_over_h = 0.3

[ramp]
t_ramp_ns = 100
h_MHz = 76

[disorder]
eta = 0.05
N_alpha = 20
base_seed = 99
)";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(kBaseConfig);
  CHECK(c.chain.n == 2);
  CHECK(*c.chain.jbar_over_h == 0.3);
  CHECK(c.ramp.v == doctest::Approx(units::pi / 100.0));
  CHECK(std::get<ConstantField>(c.ramp.field_rule).h == doctest::Approx(units::mhz_to_rad_per_ns(76.0)));
  CHECK(c.disorder.base_seed == 99);
  CHECK(c.scan.axis == ScanAxis::None);

  const RunConfig s = parse_config(std::string(kBaseConfig) + "[scan]\naxis = jbar_over_h\nstart = 0.1\nstop = 0.9\ncount = 5\n");
  CHECK(s.scan.values.size() == 5);
  CHECK(s.scan.values[2] == doctest::Approx(0.5));

  const RunConfig r = parse_config("[chain]\nN = 4\nmode = circuit\n[ramp]\nh_rule = -85, 3400\nv_rad_per_ns = 0.05\n");
  CHECK(std::get<LinearFieldRule>(r.ramp.field_rule).b == 3400.0);
  CHECK(r.ramp.v == 0.05);
}

TEST_CASE("config rejects inconsistent input") {
  CHECK_THROWS_AS(parse_config("[ramp]\nt_ramp_ns = 10\nv_rad_per_ns = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[ramp]\nh_MHz = 10\nh_rule = 1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[chain]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[disorder]\neta = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\naxis = bias\nvalues = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\naxis = theta\nvalues = 0.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\nvalues = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[chain]\nN = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[chain]\nJ_MHz = 3\njbar_over_h = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[decoherence]\nenabled = true\nT1_ns = 100\nT2_ns = 300\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("disorder samples") {
  const auto zero = sample_disorder(0.0, 1, 5);
  CHECK(zero.alpha1 == 1.0);
  CHECK(zero.alpha2 == 1.0);

  double sum1 = 0.0, sum2 = 0.0, lo = 2.0, hi = 0.0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const auto s = sample_disorder(0.05, point_seed(7, 3), static_cast<std::uint64_t>(k));
    sum1 += s.alpha1;
    sum2 += s.alpha2;
    lo = std::min({lo, s.alpha1, s.alpha2});
    hi = std::max({hi, s.alpha1, s.alpha2});
  }
  CHECK(std::abs(sum1 / n - 1.0) <= 0.002);
  CHECK(std::abs(sum2 / n - 1.0) <= 0.002);
  CHECK(lo >= 0.95);
  CHECK(hi <= 1.05);

  const auto a = sample_disorder(0.1, 42, 17);
  const auto b = sample_disorder(0.1, 42, 17);
  CHECK(a.alpha1 == b.alpha1);
  CHECK(a.alpha2 == b.alpha2);
  CHECK(sample_disorder(0.1, 42, 18).alpha1 != a.alpha1);
  CHECK(point_seed(1, 0) != point_seed(1, 1));
  CHECK_THROWS(sample_disorder(1.0, 1, 1));
}

TEST_CASE("point resolution") {
  RunConfig c = parse_config(kBaseConfig);
  c.ramp.field_rule = LinearFieldRule{};
  c.scan.axis = ScanAxis::JbarOverH;
  c.scan.values = {0.1};
  const PointSetup s = resolve_point(c, 0.1);
  CHECK(units::rad_per_ns_to_mhz(s.h) == doctest::Approx(3400.0 / 9.5));
  CHECK(s.jbar / s.h == doctest::Approx(0.1));
  CHECK(std::holds_alternative<ConstantField>(s.protocol.field_rule));

  RunConfig circ = parse_config("[chain]\nmode = circuit\nN = 3\n[scan]\naxis = bias\nvalues = 0.2\n");
  const PointSetup cs = resolve_point(circ, 0.2);
  CHECK(cs.bias_over_critical == 0.2);
  CHECK(cs.chain.bonds.size() == 2);
  CHECK(cs.chain.bonds[0].Jx == doctest::Approx(couplings(circ.circuit, 0.2 * circ.circuit.I_cr).Jx));
  circ.chain.isotropic_proxy = true;
  const PointSetup iso = resolve_point(circ, 0.2);
  CHECK(iso.chain.bonds[0].Jx == doctest::Approx(iso.chain.bonds[0].Jz));

  RunConfig t = parse_config(kBaseConfig);
  t.scan.axis = ScanAxis::RampTime;
  t.scan.values = {20.0};
  CHECK(resolve_point(t, 20.0).protocol.v == doctest::Approx(units::pi / 20.0));

  const PointSetup d = apply_disorder(resolve_point(parse_config(kBaseConfig), std::nullopt), {1.05, 0.97});
  CHECK(d.protocol.field_scale == doctest::Approx(0.97));
  CHECK(d.chain.bonds[0].Jz == doctest::Approx(1.05 * d.jbar));
}

TEST_CASE("zero disorder reproduces the deterministic curve") {
  RunConfig c = parse_config(kBaseConfig);
  c.disorder.eta = 0.0;
  c.scan.axis = ScanAxis::JbarOverH;
  c.scan.values = {0.3, 0.7};
  const auto avg = disorder_averaged_curve(c);
  const auto det = run_chern(c);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(avg[k].F_mean == det[k].F_at_theta_final);
    CHECK(avg[k].Ch_mean == det[k].Ch);
    CHECK(avg[k].samples == 1);
    CHECK(avg[k].F_stderr == 0.0);
  }
  const auto scan = run_scan(c);
  CHECK(scan[0].F == doctest::Approx(det[0].F_at_theta_final).epsilon(1e-7));
}

TEST_CASE("results are independent of the worker count") {
  RunConfig c = parse_config(kBaseConfig);
  c.scan.axis = ScanAxis::JbarOverH;
  c.scan.values = {0.2, 0.45, 0.55, 0.8};
  const std::string one = disorder_table(c, disorder_averaged_curve(c, {1})).to_csv();
  const std::string many = disorder_table(c, disorder_averaged_curve(c, {4})).to_csv();
  CHECK(one == many);
  CHECK(scan_table(c, run_scan(c, {1})).to_csv() == scan_table(c, run_scan(c, {3})).to_csv());
  c.disorder.base_seed = 100;
  CHECK(disorder_table(c, disorder_averaged_curve(c, {1})).to_csv() != one);
}

TEST_CASE("standard error shrinks as one over root N") {
  RunConfig c = parse_config(kBaseConfig);
  std::vector<double> err;
  for (int n : {125, 500, 2000}) {
    c.disorder.samples = n;
    err.push_back(disorder_averaged_curve(c).front().F_stderr);
  }
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("tables and manifests") {
  Table t;
  t.columns = {"a_MHz", "b"};
  t.add({1.0, 0.1});
  t.add({2.5, std::nan("")});
  CHECK(t.to_csv() == "a_MHz,b\n1,0.1\n2.5,nan\n");
  CHECK_THROWS_AS(t.add({1.0}), std::logic_error);

  const auto dir = std::filesystem::temp_directory_path() / "dqhe_unit_tables";
  std::filesystem::remove_all(dir);
  t.write(dir / "t.csv");
  CHECK(read_file(dir / "t.csv") == t.to_csv());
  write_manifest(dir, "test", parse_config(kBaseConfig).to_json(), 99, 1.5, {"t.csv"});
  const std::string manifest = read_file(dir / "manifest.json");
  CHECK(manifest.find("\"seed\": 99") != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("wall_time_s") != std::string::npos);
  std::filesystem::remove_all(dir);

  try {
    t.write("/proc/forbidden/t.csv");
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/proc/forbidden") != std::string::npos);
  }
}

TEST_CASE("gap and coupling scans") {
  RunConfig c = parse_config(kBaseConfig);
  c.scan.axis = ScanAxis::JbarOverH;
  c.scan.values = {0.4, 0.5, 0.6};
  const auto gaps = gap_scan(c);
  CHECK(gaps[1].gap_MHz == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(gaps[0].gap_MHz == doctest::Approx(std::abs(4 * 0.4 - 2) * 76.0));

  const std::vector<double> bias = {0.0, 0.5};
  const auto rows = couplings_scan(calibrated_fig2_params(), bias);
  CHECK(rows[0].Jx_MHz == rows[0].Jy_MHz);
  CHECK(couplings_table(rows).columns.front() == "I_b_over_Icr");
}

TEST_CASE("fig2 preset writes its table and manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "dqhe_unit_fig2";
  std::filesystem::remove_all(dir);
  const auto files = run_preset("fig2", dir, 1);
  REQUIRE(files.size() == 1);
  CHECK(std::filesystem::exists(dir / files[0]));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  const std::string first = read_file(dir / files[0]);
  run_preset("fig2", dir, 1);
  CHECK(read_file(dir / files[0]) == first);
  std::filesystem::remove_all(dir);
  CHECK_THROWS(run_preset("fig9", dir, 1));
  CHECK(preset_names().size() == 9);
}
