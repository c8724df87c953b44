#include "dqhe/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace dqhe {

namespace pt = boost::property_tree;

std::vector<double> ScanConfig::linspace(double start, double stop, int count) {
  if (count < 1) throw ConfigError("scan.count must be >= 1");
  if (count == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
  return out;
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"chain", {"N", "mode", "J_MHz", "Jx_MHz", "Jy_MHz", "Jz_MHz", "jbar_over_h", "I_b_over_Icr", "isotropic_proxy"}},
      {"circuit",
       {"preset", "qubit_frequency_GHz", "frequency_convention", "C_j_pF", "C_jp1_pF", "C_int_pF", "L_R_nH", "L_L_nH",
        "M_nH", "I_cr_uA", "N1", "N2", "L_j_nH", "flux_quantum_prefactor", "spin_normalization", "jz_prefactor"}},
      {"ramp", {"t_ramp_ns", "v_rad_per_ns", "theta_final", "phi", "h_MHz", "h_rule", "t_meas_ns", "measurement_drive"}},
      {"decoherence", {"enabled", "T1_ns", "T2_ns", "temperature_mK", "thermal_occupation", "rate_convention"}},
      {"disorder", {"eta", "N_alpha", "base_seed"}},
      {"scan", {"axis", "start", "stop", "count", "values"}},
      {"integrator", {"method", "rel_tol", "abs_tol", "max_step_ns", "fixed_step_ns", "chern_grid"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' in " + key);
    }
  }
  return out;
}

template <typename T>
std::optional<T> get(const pt::ptree& tree, const std::string& path) {
  auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'));
  if (!node) return std::nullopt;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("bad value for " + path + ": '" + node->data() + "'");
  }
}

std::optional<bool> get_bool(const pt::ptree& tree, const std::string& path) {
  auto s = get<std::string>(tree, path);
  if (!s) return std::nullopt;
  auto v = lower(*s);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + path + ": '" + *s + "'");
}

void check_keys(const pt::ptree& tree) {
  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    auto it = allowed.find(section);
    if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, _] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  }
}

RunConfig from_tree(const pt::ptree& t) {
  check_keys(t);
  RunConfig c;

  // circuit first: chain mode may depend on it
  if (auto preset = get<std::string>(t, "circuit.preset")) {
    auto p = lower(*preset);
    if (p == "literal") c.circuit = literal_fig2_params();
    else if (p == "calibrated") c.circuit = calibrated_fig2_params();
    else throw ConfigError("circuit.preset must be literal or calibrated");
  }
  auto& cp = c.circuit;
  if (auto v = get<double>(t, "circuit.qubit_frequency_GHz")) cp.qubit_frequency_ghz = *v;
  if (auto v = get<std::string>(t, "circuit.frequency_convention")) {
    auto s = lower(*v);
    if (s == "ordinary") cp.frequency_convention = FrequencyConvention::Ordinary;
    else if (s == "angular") cp.frequency_convention = FrequencyConvention::Angular;
    else throw ConfigError("circuit.frequency_convention must be ordinary or angular");
  }
  if (auto v = get<double>(t, "circuit.C_j_pF")) cp.C_j = *v;
  if (auto v = get<double>(t, "circuit.C_jp1_pF")) cp.C_jp1 = *v;
  if (auto v = get<double>(t, "circuit.C_int_pF")) cp.C_int = *v;
  if (auto v = get<double>(t, "circuit.L_R_nH")) cp.L_R = *v;
  if (auto v = get<double>(t, "circuit.L_L_nH")) cp.L_L = *v;
  if (auto v = get<double>(t, "circuit.M_nH")) cp.M = std::abs(*v);
  if (auto v = get<double>(t, "circuit.I_cr_uA")) cp.I_cr = *v;
  if (auto v = get<double>(t, "circuit.N1")) cp.N1 = *v;
  if (auto v = get<double>(t, "circuit.N2")) cp.N2 = *v;
  if (auto v = get<double>(t, "circuit.L_j_nH")) cp.L_j = *v;
  if (auto v = get_bool(t, "circuit.flux_quantum_prefactor")) cp.flux_quantum_prefactor = *v;
  if (auto v = get<double>(t, "circuit.spin_normalization")) cp.spin_normalization = *v;
  if (auto v = get<std::string>(t, "circuit.jz_prefactor")) {
    if (lower(*v) == "literal") cp.jz_prefactor.reset();
    else cp.jz_prefactor = parse_list(*v, "circuit.jz_prefactor").at(0);
  }

  auto& ch = c.chain;
  if (auto v = get<int>(t, "chain.N")) ch.n = *v;
  if (auto v = get<std::string>(t, "chain.mode")) {
    auto s = lower(*v);
    if (s == "direct") ch.mode = ChainMode::Direct;
    else if (s == "circuit") ch.mode = ChainMode::Circuit;
    else throw ConfigError("chain.mode must be direct or circuit");
  }
  auto J = get<double>(t, "chain.J_MHz");
  auto Jx = get<double>(t, "chain.Jx_MHz");
  auto Jy = get<double>(t, "chain.Jy_MHz");
  auto Jz = get<double>(t, "chain.Jz_MHz");
  if (J && (Jx || Jy || Jz)) throw ConfigError("chain.J_MHz excludes chain.Jx_MHz/Jy_MHz/Jz_MHz");
  if (J) ch.Jx_MHz = ch.Jy_MHz = ch.Jz_MHz = *J;
  if (Jx) ch.Jx_MHz = *Jx;
  if (Jy) ch.Jy_MHz = *Jy;
  if (Jz) ch.Jz_MHz = *Jz;
  ch.jbar_over_h = get<double>(t, "chain.jbar_over_h");
  if (ch.jbar_over_h && (J || Jx || Jy || Jz)) throw ConfigError("chain.jbar_over_h excludes explicit couplings");
  if (auto v = get<double>(t, "chain.I_b_over_Icr")) ch.bias_over_critical = *v;
  if (auto v = get_bool(t, "chain.isotropic_proxy")) ch.isotropic_proxy = *v;

  FieldRule rule = ConstantField{units::mhz_to_rad_per_ns(76.0)};
  auto h = get<double>(t, "ramp.h_MHz");
  auto h_rule = get<std::string>(t, "ramp.h_rule");
  if (h && h_rule) throw ConfigError("ramp.h_MHz and ramp.h_rule are mutually exclusive");
  if (h) rule = ConstantField{units::mhz_to_rad_per_ns(*h)};
  if (h_rule) {
    auto ab = parse_list(*h_rule, "ramp.h_rule");
    if (ab.size() != 2) throw ConfigError("ramp.h_rule needs two numbers: a, b");
    rule = LinearFieldRule{ab[0], ab[1]};
  }
  auto t_ramp = get<double>(t, "ramp.t_ramp_ns");
  auto v = get<double>(t, "ramp.v_rad_per_ns");
  if (t_ramp && v) throw ConfigError("ramp.t_ramp_ns and ramp.v_rad_per_ns are mutually exclusive");
  if (t_ramp) {
    if (!(*t_ramp > 0)) throw ConfigError("ramp.t_ramp_ns must be positive");
    c.ramp.v = units::pi / *t_ramp;
  }
  if (v) c.ramp.v = *v;
  c.ramp.field_rule = rule;
  if (auto x = get<double>(t, "ramp.theta_final")) c.ramp.theta_final = *x;
  if (auto x = get<double>(t, "ramp.phi")) c.ramp.phi = *x;
  if (auto x = get<double>(t, "ramp.t_meas_ns")) c.ramp.t_meas = *x;
  if (auto x = get<std::string>(t, "ramp.measurement_drive")) {
    auto s = lower(*x);
    if (s == "off") c.ramp.measurement_drive = MeasurementDrive::Off;
    else if (s == "frozen") c.ramp.measurement_drive = MeasurementDrive::Frozen;
    else throw ConfigError("ramp.measurement_drive must be off or frozen");
  }

  if (auto x = get_bool(t, "decoherence.enabled")) c.decoherence_enabled = *x;
  auto& d = c.decoherence;
  d.qubit_frequency_ghz = cp.qubit_frequency_ghz;
  if (auto x = get<double>(t, "decoherence.T1_ns")) d.T1 = *x;
  if (auto x = get<double>(t, "decoherence.T2_ns")) d.T2 = *x;
  if (auto x = get<double>(t, "decoherence.temperature_mK")) d.temperature_mK = *x;
  if (auto x = get_bool(t, "decoherence.thermal_occupation")) d.thermal_occupation = *x;
  if (auto x = get<std::string>(t, "decoherence.rate_convention")) {
    auto s = lower(*x);
    if (s == "paper" || s == "literal") d.convention = RateConvention::Paper;
    else if (s == "calibrated") d.convention = RateConvention::Calibrated;
    else throw ConfigError("decoherence.rate_convention must be literal or calibrated");
  }

  if (auto x = get<double>(t, "disorder.eta")) c.disorder.eta = *x;
  if (auto x = get<int>(t, "disorder.N_alpha")) c.disorder.samples = *x;
  if (auto x = get<std::uint64_t>(t, "disorder.base_seed")) c.disorder.base_seed = *x;

  if (auto x = get<std::string>(t, "scan.axis")) {
    auto s = lower(*x);
    if (s == "none") c.scan.axis = ScanAxis::None;
    else if (s == "bias") c.scan.axis = ScanAxis::Bias;
    else if (s == "jbar_over_h") c.scan.axis = ScanAxis::JbarOverH;
    else if (s == "t_ramp") c.scan.axis = ScanAxis::RampTime;
    else if (s == "theta") c.scan.axis = ScanAxis::Theta;
    else throw ConfigError("scan.axis must be one of none, bias, jbar_over_h, t_ramp, theta");
  }
  auto values = get<std::string>(t, "scan.values");
  auto start = get<double>(t, "scan.start");
  auto stop = get<double>(t, "scan.stop");
  auto count = get<int>(t, "scan.count");
  if (values && (start || stop || count)) throw ConfigError("scan.values excludes scan.start/stop/count");
  if (values) c.scan.values = parse_list(*values, "scan.values");
  if (start || stop || count) {
    if (!(start && stop && count)) throw ConfigError("scan needs all of start, stop, count");
    c.scan.values = ScanConfig::linspace(*start, *stop, *count);
  }

  auto& ic = c.integrator;
  if (auto x = get<std::string>(t, "integrator.method")) {
    auto s = lower(*x);
    if (s == "dopri5" || s == "rk45") ic.method = IntegrationMethod::DormandPrince45;
    else if (s == "rk4") ic.method = IntegrationMethod::ClassicalRK4;
    else throw ConfigError("integrator.method must be dopri5 or rk4");
  }
  if (auto x = get<double>(t, "integrator.rel_tol")) ic.rel_tol = *x;
  if (auto x = get<double>(t, "integrator.abs_tol")) ic.abs_tol = *x;
  if (auto x = get<double>(t, "integrator.max_step_ns")) ic.max_step = *x;
  if (auto x = get<double>(t, "integrator.fixed_step_ns")) ic.fixed_step = *x;
  if (auto x = get<int>(t, "integrator.chern_grid")) c.chern_grid = *x;

  if (auto x = get<std::string>(t, "output.dir")) c.output_dir = *x;

  c.validate();
  return c;
}

const char* axis_name(ScanAxis a) {
  switch (a) {
    case ScanAxis::None: return "none";
    case ScanAxis::Bias: return "bias";
    case ScanAxis::JbarOverH: return "jbar_over_h";
    case ScanAxis::RampTime: return "t_ramp";
    case ScanAxis::Theta: return "theta";
  }
  return "?";
}

}  // namespace

void RunConfig::validate() const {
  if (chain.n < 1) throw ConfigError("chain.N must be >= 1");
  if (chain.n > 10) throw ConfigError("chain.N above 10 is not supported by the dense solvers");
  if (chain.mode == ChainMode::Circuit) {
    if (chain.bias_over_critical < 0 || chain.bias_over_critical >= 1)
      throw ConfigError("chain.I_b_over_Icr must lie in [0, 1)");
  }
  if (chain.jbar_over_h && *chain.jbar_over_h < 0) throw ConfigError("chain.jbar_over_h must be >= 0");
  try {
    circuit.validate();
    ramp.validate();
    integrator.validate();
    if (decoherence_enabled) decoherence.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(disorder.eta >= 0 && disorder.eta < 1)) throw ConfigError("disorder.eta must lie in [0, 1)");
  if (disorder.samples < 1) throw ConfigError("disorder.N_alpha must be >= 1");
  if (chern_grid < 3) throw ConfigError("integrator.chern_grid must be >= 3");
  if (scan.axis != ScanAxis::None && scan.values.empty()) throw ConfigError("scan axis set but no scan values");
  if (scan.axis == ScanAxis::None && !scan.values.empty()) throw ConfigError("scan values given without scan.axis");
  if (scan.axis == ScanAxis::Bias && chain.mode != ChainMode::Circuit)
    throw ConfigError("scan.axis = bias requires chain.mode = circuit");
  if (scan.axis == ScanAxis::JbarOverH && chain.mode != ChainMode::Direct)
    throw ConfigError("scan.axis = jbar_over_h requires chain.mode = direct");
  for (double x : scan.values) {
    if (!std::isfinite(x)) throw ConfigError("non-finite scan value");
    if (scan.axis == ScanAxis::Bias && (x < 0 || x >= 1)) throw ConfigError("bias scan values must lie in [0, 1)");
    if (scan.axis == ScanAxis::RampTime && x <= 0) throw ConfigError("t_ramp scan values must be positive");
    if (scan.axis == ScanAxis::Theta && (x <= 0 || x > units::pi))
      throw ConfigError("theta scan values must lie in (0, pi]");
    if (scan.axis == ScanAxis::JbarOverH && x < 0) throw ConfigError("jbar_over_h scan values must be >= 0");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["chain"] = {{"N", chain.n},
                {"mode", chain.mode == ChainMode::Direct ? "direct" : "circuit"},
                {"Jx_MHz", chain.Jx_MHz},
                {"Jy_MHz", chain.Jy_MHz},
                {"Jz_MHz", chain.Jz_MHz},
                {"I_b_over_Icr", chain.bias_over_critical},
                {"isotropic_proxy", chain.isotropic_proxy}};
  if (chain.jbar_over_h) j["chain"]["jbar_over_h"] = *chain.jbar_over_h;
  j["circuit"] = {{"qubit_frequency_GHz", circuit.qubit_frequency_ghz},
                  {"frequency_convention",
                   circuit.frequency_convention == FrequencyConvention::Ordinary ? "ordinary" : "angular"},
                  {"C_j_pF", circuit.C_j},
                  {"C_jp1_pF", circuit.C_jp1},
                  {"C_int_pF", circuit.C_int},
                  {"L_R_nH", circuit.L_R},
                  {"L_L_nH", circuit.L_L},
                  {"M_nH", circuit.M},
                  {"I_cr_uA", circuit.I_cr},
                  {"N1", circuit.N1},
                  {"N2", circuit.N2},
                  {"L_j_nH", circuit.L_j},
                  {"flux_quantum_prefactor", circuit.flux_quantum_prefactor},
                  {"spin_normalization", circuit.spin_normalization},
                  {"jz_coefficient", circuit.jz_coefficient()}};
  j["ramp"] = {{"v_rad_per_ns", ramp.v},
               {"t_ramp_ns", ramp.ramp_time()},
               {"theta_final", ramp.theta_final},
               {"phi", ramp.phi},
               {"t_meas_ns", ramp.t_meas},
               {"measurement_drive", ramp.measurement_drive == MeasurementDrive::Off ? "off" : "frozen"}};
  if (auto* c = std::get_if<ConstantField>(&ramp.field_rule)) j["ramp"]["h_MHz"] = units::rad_per_ns_to_mhz(c->h);
  if (auto* r = std::get_if<LinearFieldRule>(&ramp.field_rule)) j["ramp"]["h_rule"] = {r->a, r->b};
  j["decoherence"] = {{"enabled", decoherence_enabled},
                      {"T1_ns", decoherence.T1},
                      {"T2_ns", decoherence.T2},
                      {"temperature_mK", decoherence.temperature_mK},
                      {"thermal_occupation", decoherence.thermal_occupation},
                      {"rate_convention", decoherence.convention == RateConvention::Paper ? "literal" : "calibrated"}};
  j["disorder"] = {{"eta", disorder.eta}, {"N_alpha", disorder.samples}, {"base_seed", disorder.base_seed}};
  j["scan"] = {{"axis", axis_name(scan.axis)}, {"values", scan.values}};
  j["integrator"] = {{"method", integrator.method == IntegrationMethod::DormandPrince45 ? "dopri5" : "rk4"},
                     {"rel_tol", integrator.rel_tol},
                     {"abs_tol", integrator.abs_tol},
                     {"max_step_ns", integrator.max_step},
                     {"fixed_step_ns", integrator.fixed_step},
                     {"chern_grid", chern_grid}};
  j["output"] = {{"dir", output_dir.string()}};
  return j;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  return from_tree(tree);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dqhe
