#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dicke/errors.hpp"

namespace dicke::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  std::ostringstream os;
  if (node.Mark().line >= 0) os << "line " << node.Mark().line + 1 << ": ";
  os << message;
  throw ConfigError(os.str());
}

void require_map(const YAML::Node& node, const std::string& section) {
  if (!node.IsMap()) fail(node, "section '" + section + "' must be a mapping");
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
  require_map(node, section);
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (!allowed.contains(key)) fail(entry.first, "unknown key '" + key + "' in section '" + section + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, "field '" + field + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(node, "field '" + field + "' has the wrong type: '" + node.Scalar() + "'");
  }
}

double number(const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(node, field);
  if (!std::isfinite(v)) fail(node, "field '" + field + "' must be finite");
  return v;
}

double positive(const YAML::Node& node, const std::string& field) {
  const double v = number(node, field);
  if (v <= 0.0) fail(node, "field '" + field + "' must be positive");
  return v;
}

double frequency(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, "field '" + field + "' must be a frequency");
  try {
    return parse_frequency(node.Scalar());
  } catch (const ConfigError& e) {
    fail(node, "field '" + field + "': " + e.what());
  }
}

template <class T>
void read(const YAML::Node& section, const char* key, T& out) {
  if (const auto node = section[key]) out = scalar<T>(node, key);
}

void read_optional_frequency(const YAML::Node& section, const char* key, std::optional<double>& out) {
  if (const auto node = section[key]) out = frequency(node, key);
}

void read_optional_number(const YAML::Node& section, const char* key, std::optional<double>& out) {
  if (const auto node = section[key]) out = positive(node, key);
}

PhysicalSpec parse_physical(const YAML::Node& node) {
  check_keys(node, "physical",
             {"n_qubits", "omega0", "g", "delta_c", "delta_c_over_g", "lambda", "lambda_over_g", "epsilon",
              "epsilon_over_g", "epsilon_over_lambda", "T_r", "T_c", "n_max"});
  PhysicalSpec spec;
  if (!node["n_qubits"]) fail(node, "section 'physical' needs 'n_qubits'");
  spec.n_qubits = scalar<int>(node["n_qubits"], "n_qubits");
  if (spec.n_qubits < 1) fail(node["n_qubits"], "field 'n_qubits' must be at least 1");
  if (node["omega0"]) spec.omega0 = frequency(node["omega0"], "omega0");
  read_optional_frequency(node, "g", spec.g);
  read_optional_frequency(node, "delta_c", spec.delta_c);
  read_optional_number(node, "delta_c_over_g", spec.delta_c_over_g);
  read_optional_frequency(node, "lambda", spec.lambda);
  read_optional_number(node, "lambda_over_g", spec.lambda_over_g);
  read_optional_frequency(node, "epsilon", spec.epsilon);
  read_optional_number(node, "epsilon_over_g", spec.epsilon_over_g);
  read_optional_number(node, "epsilon_over_lambda", spec.epsilon_over_lambda);
  if (node["T_r"]) spec.T_r = positive(node["T_r"], "T_r");
  if (node["T_c"]) spec.T_c = positive(node["T_c"], "T_c");
  if (node["n_max"]) {
    spec.n_max = scalar<int>(node["n_max"], "n_max");
    if (spec.n_max < 2) fail(node["n_max"], "field 'n_max' must be at least 2");
  }
  try {
    resolve(spec);
  } catch (const ConfigError& e) {
    fail(node, e.what());
  }
  return spec;
}

Complex parse_amplitude(const YAML::Node& node) {
  if (node.IsScalar()) return {number(node, "amplitude"), 0.0};
  if (node.IsSequence()) {
    if (node.size() != 2) fail(node, "amplitude pairs are [re, im]");
    return {number(node[0], "re"), number(node[1], "im")};
  }
  require_map(node, "amplitude");
  if (node["re"] || node["im"]) {
    check_keys(node, "amplitude", {"re", "im"});
    return {node["re"] ? number(node["re"], "re") : 0.0, node["im"] ? number(node["im"], "im") : 0.0};
  }
  check_keys(node, "amplitude", {"mag", "phase"});
  if (!node["mag"]) fail(node, "amplitude needs either re/im or mag/phase");
  return std::polar(number(node["mag"], "mag"), node["phase"] ? number(node["phase"], "phase") : 0.0);
}

std::vector<Complex> parse_target(const YAML::Node& node, int n_qubits) {
  check_keys(node, "target", {"amplitudes", "preset"});
  if (node["amplitudes"] && node["preset"]) fail(node, "target takes either 'amplitudes' or 'preset'");
  std::vector<Complex> amps;
  if (const auto list = node["amplitudes"]) {
    if (!list.IsSequence() || list.size() == 0) fail(list, "'amplitudes' must be a non-empty list");
    for (const auto& item : list) amps.push_back(parse_amplitude(item));
  } else if (const auto preset = node["preset"]) {
    const auto name = scalar<std::string>(preset, "preset");
    if (name == "ghz") {
      amps.assign(static_cast<std::size_t>(n_qubits + 1), 0.0);
      amps.front() = amps.back() = 1.0 / std::sqrt(2.0);
    } else if (name == "w") {
      amps = {0.0, 1.0};
    } else if (name == "ground") {
      amps = {1.0};
    } else {
      fail(preset, "unknown preset '" + name + "' (expected ghz, w or ground)");
    }
  } else {
    fail(node, "target needs 'amplitudes' or 'preset'");
  }
  try {
    TargetState(n_qubits, amps);
  } catch (const DomainError& e) {
    fail(node, std::string("invalid target: ") + e.what());
  }
  return amps;
}

IntegratorConfig parse_integrator(const YAML::Node& node) {
  check_keys(node, "integrator",
             {"method", "rel_tol", "abs_tol", "max_step", "fixed_steps_per_segment", "samples_per_segment",
              "norm_tolerance", "max_attempts"});
  IntegratorConfig cfg;
  if (const auto m = node["method"]) {
    const auto name = scalar<std::string>(m, "method");
    if (name == "dopri5") {
      cfg.method = IntegrationMethod::AdaptiveDopri5;
    } else if (name == "rk4") {
      cfg.method = IntegrationMethod::FixedRk4;
    } else {
      fail(m, "unknown method '" + name + "' (expected dopri5 or rk4)");
    }
  }
  if (node["rel_tol"]) cfg.rel_tol = positive(node["rel_tol"], "rel_tol");
  if (node["abs_tol"]) cfg.abs_tol = positive(node["abs_tol"], "abs_tol");
  if (node["max_step"]) cfg.max_step = positive(node["max_step"], "max_step");
  if (node["norm_tolerance"]) cfg.norm_tolerance = positive(node["norm_tolerance"], "norm_tolerance");
  read(node, "fixed_steps_per_segment", cfg.fixed_steps_per_segment);
  read(node, "samples_per_segment", cfg.samples_per_segment);
  read(node, "max_attempts", cfg.max_attempts);
  if (cfg.fixed_steps_per_segment < 0) fail(node["fixed_steps_per_segment"], "must be nonnegative");
  if (cfg.samples_per_segment < 2) fail(node["samples_per_segment"], "'samples_per_segment' must be at least 2");
  if (cfg.max_attempts < 1) fail(node["max_attempts"], "'max_attempts' must be positive");
  return cfg;
}

BudgetSection parse_budget(const YAML::Node& node) {
  check_keys(node, "budget",
             {"T_d_override", "leakage_reference", "numeric_leakage", "simulation_result", "prefer_numeric"});
  BudgetSection b;
  read_optional_number(node, "T_d_override", b.T_d_override);
  if (const auto ref = node["leakage_reference"]) {
    b.leakage_reference = number(ref, "leakage_reference");
    if (*b.leakage_reference < 0.0) fail(ref, "'leakage_reference' must be nonnegative");
  }
  read(node, "numeric_leakage", b.numeric_leakage);
  read(node, "simulation_result", b.simulation_result);
  read(node, "prefer_numeric", b.prefer_numeric);
  return b;
}

ValidateSection parse_validate(const YAML::Node& node) {
  check_keys(node, "validate",
             {"random_schedules", "segments", "negative_control", "amplitude_tolerance", "asymmetric_tolerance",
              "negative_control_threshold"});
  ValidateSection v;
  read(node, "random_schedules", v.random_schedules);
  read(node, "segments", v.segments);
  read(node, "negative_control", v.negative_control);
  if (node["amplitude_tolerance"]) v.amplitude_tolerance = positive(node["amplitude_tolerance"], "amplitude_tolerance");
  if (node["asymmetric_tolerance"]) {
    v.asymmetric_tolerance = positive(node["asymmetric_tolerance"], "asymmetric_tolerance");
  }
  if (node["negative_control_threshold"]) {
    v.negative_control_threshold = positive(node["negative_control_threshold"], "negative_control_threshold");
  }
  if (v.random_schedules < 0 || v.segments < 0) fail(node, "counts in 'validate' must be nonnegative");
  return v;
}

const std::set<std::string> kFrequencySweeps = {"lambda", "epsilon", "delta_c", "g"};
const std::set<std::string> kRatioSweeps = {"epsilon_over_lambda", "epsilon_over_g", "delta_c_over_g",
                                            "lambda_over_g"};

SweepSection parse_sweep(const YAML::Node& node) {
  check_keys(node, "sweep", {"command", "parameter", "values", "random_targets", "random_top_level"});
  SweepSection s;
  read(node, "command", s.command);
  if (s.command != "compile" && s.command != "simulate" && s.command != "cavity" && s.command != "budget") {
    fail(node["command"], "sweep command must be compile, simulate, budget or cavity");
  }
  read(node, "parameter", s.parameter);
  read(node, "random_targets", s.random_targets);
  read(node, "random_top_level", s.random_top_level);
  if (s.random_targets < 0) fail(node["random_targets"], "'random_targets' must be nonnegative");
  if (const auto values = node["values"]) {
    if (!values.IsSequence()) fail(values, "'values' must be a list");
    const bool is_frequency = kFrequencySweeps.contains(s.parameter);
    for (const auto& v : values) s.values.push_back(is_frequency ? frequency(v, "values") : positive(v, "values"));
  }
  if (!s.parameter.empty() && !kFrequencySweeps.contains(s.parameter) && !kRatioSweeps.contains(s.parameter)) {
    fail(node["parameter"], "cannot sweep '" + s.parameter + "'");
  }
  if (s.parameter.empty() != s.values.empty()) fail(node, "sweep needs both 'parameter' and 'values'");
  if (s.values.empty() && s.random_targets == 0) fail(node, "sweep has no points");
  return s;
}

}  // namespace

double parse_frequency(const std::string& text) {
  std::string body = text;
  body.erase(0, body.find_first_not_of(" \t"));
  body.erase(body.find_last_not_of(" \t") + 1);
  for (const std::string prefix : {"2pi*", "2*pi*"}) {
    if (body.rfind(prefix, 0) == 0) {
      body = body.substr(prefix.size());
      break;
    }
  }
  std::size_t used = 0;
  double hz = 0.0;
  try {
    hz = std::stod(body, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot read '" + text + "' as a frequency in Hz");
  }
  if (used != body.size() || !std::isfinite(hz)) throw ConfigError("cannot read '" + text + "' as a frequency in Hz");
  return kTwoPi * hz;
}

DriveFrame parse_frame(const std::string& text) {
  if (text == "rotating") return DriveFrame::Rotating;
  if (text == "lab") return DriveFrame::Lab;
  throw ConfigError("frame must be 'lab' or 'rotating', got '" + text + "'");
}

PhysicalParams resolve(const PhysicalSpec& spec) {
  auto exclusive = [](std::initializer_list<bool> given, const std::string& what) {
    int count = 0;
    for (bool b : given) count += b;
    if (count > 1) throw ConfigError(what + " is specified more than once");
    return count == 1;
  };
  PhysicalParams p;
  p.omega0 = spec.omega0;
  p.g = spec.g.value_or(0.0);
  p.T_r = spec.T_r;
  p.T_c = spec.T_c;
  p.n_max = spec.n_max;

  if (exclusive({spec.delta_c.has_value(), spec.delta_c_over_g.has_value()}, "delta_c")) {
    if (spec.delta_c_over_g && !spec.g) throw ConfigError("delta_c_over_g needs g");
    p.delta_c = spec.delta_c ? *spec.delta_c : *spec.delta_c_over_g * p.g;
  }
  if (exclusive({spec.lambda.has_value(), spec.lambda_over_g.has_value()}, "lambda")) {
    if (spec.lambda_over_g && !spec.g) throw ConfigError("lambda_over_g needs g");
    p.lambda = spec.lambda ? *spec.lambda : *spec.lambda_over_g * p.g;
  } else if (p.g != 0.0 && p.delta_c != 0.0) {
    p.lambda = p.lambda_cavity();
  } else {
    throw ConfigError("lambda is missing (give lambda, lambda_over_g, or g with delta_c)");
  }
  if (!exclusive({spec.epsilon.has_value(), spec.epsilon_over_g.has_value(), spec.epsilon_over_lambda.has_value()},
                 "epsilon")) {
    throw ConfigError("epsilon is missing (give epsilon, epsilon_over_g or epsilon_over_lambda)");
  }
  if (spec.epsilon_over_g && !spec.g) throw ConfigError("epsilon_over_g needs g");
  p.epsilon = spec.epsilon           ? *spec.epsilon
              : spec.epsilon_over_g ? *spec.epsilon_over_g * p.g
                                    : *spec.epsilon_over_lambda * p.lambda;
  if (p.lambda == 0.0) throw ConfigError("lambda must be nonzero");
  if (p.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
  return p;
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of sections");
  check_keys(root, "top level",
             {"physical", "target", "integrator", "frame", "output", "seed", "jobs", "budget", "validate", "sweep"});

  RunConfig cfg;
  if (!root["physical"]) throw ConfigError("missing section 'physical'");
  cfg.physical = parse_physical(root["physical"]);
  cfg.params = resolve(cfg.physical);
  if (!root["target"]) throw ConfigError("missing section 'target'");
  cfg.target = parse_target(root["target"], cfg.physical.n_qubits);
  if (const auto node = root["integrator"]) cfg.integrator = parse_integrator(node);
  if (const auto node = root["frame"]) {
    try {
      cfg.frame = parse_frame(scalar<std::string>(node, "frame"));
    } catch (const ConfigError& e) {
      fail(node, e.what());
    }
  }
  if (const auto node = root["output"]) {
    check_keys(node, "output", {"dir", "trajectory"});
    read(node, "dir", cfg.out_dir);
    read(node, "trajectory", cfg.write_trajectory);
  }
  read(root, "seed", cfg.seed);
  read(root, "jobs", cfg.jobs);
  if (cfg.jobs < 1) fail(root["jobs"], "'jobs' must be at least 1");
  if (const auto node = root["budget"]) cfg.budget = parse_budget(node);
  if (const auto node = root["validate"]) cfg.validate = parse_validate(node);
  if (const auto node = root["sweep"]) cfg.sweep = parse_sweep(node);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  const auto& p = c.params;
  json target = json::array();
  for (const auto& a : c.target) target.push_back({a.real(), a.imag()});
  const auto& ic = c.integrator;
  json out = {
      {"physical",
       {{"n_qubits", c.physical.n_qubits},
        {"omega0_rad_s", p.omega0},
        {"g_rad_s", p.g},
        {"delta_c_rad_s", p.delta_c},
        {"lambda_rad_s", p.lambda},
        {"epsilon_rad_s", p.epsilon},
        {"T_r_s", p.T_r},
        {"T_c_s", p.T_c},
        {"n_max", p.n_max}}},
      {"target", target},
      {"integrator",
       {{"method", ic.method == IntegrationMethod::FixedRk4 ? "rk4" : "dopri5"},
        {"rel_tol", ic.rel_tol},
        {"abs_tol", ic.abs_tol},
        {"max_step", ic.max_step},
        {"fixed_steps_per_segment", ic.fixed_steps_per_segment},
        {"samples_per_segment", ic.samples_per_segment},
        {"norm_tolerance", ic.norm_tolerance},
        {"max_attempts", ic.max_attempts}}},
      {"frame", to_string(c.frame)},
      {"seed", c.seed},
  };
  json budget = {{"numeric_leakage", c.budget.numeric_leakage}, {"prefer_numeric", c.budget.prefer_numeric}};
  budget["T_d_override"] = c.budget.T_d_override ? json(*c.budget.T_d_override) : json(nullptr);
  budget["leakage_reference"] = c.budget.leakage_reference ? json(*c.budget.leakage_reference) : json(nullptr);
  budget["simulation_result"] = c.budget.simulation_result;
  out["budget"] = budget;
  const auto& v = c.validate;
  out["validate"] = {{"random_schedules", v.random_schedules},
                     {"segments", v.segments},
                     {"negative_control", v.negative_control},
                     {"amplitude_tolerance", v.amplitude_tolerance},
                     {"asymmetric_tolerance", v.asymmetric_tolerance},
                     {"negative_control_threshold", v.negative_control_threshold}};
  if (c.sweep) {
    out["sweep"] = {{"command", c.sweep->command},
                    {"parameter", c.sweep->parameter},
                    {"values", c.sweep->values},
                    {"random_targets", c.sweep->random_targets},
                    {"random_top_level", c.sweep->random_top_level}};
  }
  return out;
}

}  // namespace dicke::cli
