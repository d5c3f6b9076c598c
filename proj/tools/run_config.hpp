#pragma once

// YAML run configuration for the dicke command-line tool.
//
// Frequencies are given in Hz, either as a number or as "2pi*X"; both are
// stored as angular frequencies 2*pi*X rad/s. Times are in seconds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dicke/core.hpp"
#include "dicke/dynamics.hpp"
#include "dicke/pulse.hpp"

namespace dicke::cli {

/// Physical section as written, before ratios are resolved.
struct PhysicalSpec {
  int n_qubits = 0;
  double omega0 = 0.0;
  std::optional<double> g;
  std::optional<double> delta_c;
  std::optional<double> delta_c_over_g;
  std::optional<double> lambda;
  std::optional<double> lambda_over_g;
  std::optional<double> epsilon;
  std::optional<double> epsilon_over_g;
  std::optional<double> epsilon_over_lambda;
  double T_r = 0.0;
  double T_c = 0.0;
  int n_max = 4;
};

/// Resolves ratios: delta_c from g, lambda from g or from g^2/delta_c when
/// omitted, epsilon from g or lambda. Throws ConfigError when a quantity is
/// missing or specified twice.
PhysicalParams resolve(const PhysicalSpec& spec);

struct BudgetSection {
  std::optional<double> T_d_override;
  std::optional<double> leakage_reference;
  /// Integrate the schedule and report the off-target population.
  bool numeric_leakage = false;
  /// Result JSON of an earlier simulate run to take the numeric leakage from.
  std::string simulation_result;
  bool prefer_numeric = false;
};

struct ValidateSection {
  int random_schedules = 20;
  /// Segments per random schedule; 0 means N.
  int segments = 0;
  bool negative_control = false;
  double amplitude_tolerance = 1e-7;
  double asymmetric_tolerance = 1e-10;
  double negative_control_threshold = 1e-4;
};

struct SweepSection {
  std::string command = "simulate";
  std::string parameter;
  std::vector<double> values;
  /// When positive, each sweep value is combined with this many seeded random
  /// targets instead of the configured one.
  int random_targets = 0;
  /// Highest level of the random targets; -1 means N.
  int random_top_level = -1;
};

struct RunConfig {
  PhysicalSpec physical;
  PhysicalParams params;
  std::vector<Complex> target;
  IntegratorConfig integrator;
  DriveFrame frame = DriveFrame::Rotating;
  std::string out_dir = "out";
  bool write_trajectory = true;
  std::uint64_t seed = 1;
  int jobs = 1;
  BudgetSection budget;
  ValidateSection validate;
  std::optional<SweepSection> sweep;

  int n_qubits() const { return physical.n_qubits; }
};

/// Parses YAML text. Unknown keys, wrong types and unusable values raise
/// ConfigError carrying the line number.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/// Parses a frequency given in Hz ("25e3" or "2pi*25e3") into rad/s.
double parse_frequency(const std::string& text);

DriveFrame parse_frame(const std::string& text);

/// Fully resolved configuration, angular frequencies in rad/s.
nlohmann::json to_json(const RunConfig& config);

}  // namespace dicke::cli
