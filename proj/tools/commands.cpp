#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "dicke/cavity.hpp"
#include "dicke/error_budget.hpp"
#include "dicke/errors.hpp"
#include "dicke/full_space.hpp"
#include "dicke/sampling.hpp"

#ifndef DICKE_VERSION
#define DICKE_VERSION "unknown"
#endif

namespace dicke::cli {

namespace {

using nlohmann::json;

json header(const std::string& command, const RunConfig& config) {
  return {{"command", command}, {"version", version()}, {"config", to_json(config)}};
}

json complex_list(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v(k).real(), v(k).imag()});
  return out;
}

json populations(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(std::norm(v(k)));
  return out;
}

json stats_json(const StepStats& s) {
  return {{"accepted", s.accepted},
          {"rejected", s.rejected},
          {"smallest_step_s", s.accepted > 0 ? s.smallest_step : 0.0},
          {"largest_step_s", s.largest_step}};
}

json schedule_json(const PulseSchedule& schedule) {
  json segments = json::array();
  for (const auto& seg : schedule.segments) {
    segments.push_back({{"step_index", seg.step_index},
                        {"frequency_rad_s", seg.frequency},
                        {"phase_rad", seg.phase},
                        {"amplitude_rad_s", seg.amplitude},
                        {"duration_s", seg.duration}});
  }
  json target = json::array();
  for (const auto& a : schedule.target.amplitudes()) target.push_back({a.real(), a.imag()});
  return {{"n_qubits", schedule.n_qubits()},
          {"total_duration_s", schedule.total_duration()},
          {"segments", segments},
          {"target", target},
          {"global_phase_rad", schedule.target.global_phase()},
          {"notes", schedule.notes}};
}

PulseSchedule compile_config(const RunConfig& config) {
  return compile(TargetState(config.n_qubits(), config.target), config.params);
}

std::string trajectory_csv(const std::vector<TrajectorySample>& trajectory) {
  std::ostringstream os;
  write_trajectory_csv(os, trajectory);
  return os.str();
}

std::string segment_table(const PulseSchedule& schedule) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%4s %22s %12s %16s %14s\n", "m", "frequency (rad/s)", "phase (rad)",
                "amplitude (rad/s)", "duration (ms)");
  os << line;
  for (const auto& seg : schedule.segments) {
    std::snprintf(line, sizeof line, "%4d %22.12e %12.6f %16.6e %14.6g\n", seg.step_index, seg.frequency, seg.phase,
                  seg.amplitude, seg.duration * 1e3);
    os << line;
  }
  return os.str();
}

/// Drive rate of the nearest transition the last segment is not meant to hit.
double neighbour_rate(const PulseSchedule& schedule) {
  if (schedule.segments.empty()) return 0.0;
  const int n = schedule.n_qubits();
  const auto& last = schedule.segments.back();
  const int m = last.step_index;
  if (m < n) return last.amplitude * ladder_up_coeff(LadderIndex(n, m));
  if (m >= 2) return last.amplitude * ladder_up_coeff(LadderIndex(n, m - 2));
  return 0.0;
}

void apply_override(PhysicalSpec& spec, const std::string& parameter, double value) {
  if (parameter == "lambda") {
    spec.lambda = value;
    spec.lambda_over_g.reset();
  } else if (parameter == "lambda_over_g") {
    spec.lambda_over_g = value;
    spec.lambda.reset();
  } else if (parameter == "epsilon") {
    spec.epsilon = value;
    spec.epsilon_over_g.reset();
    spec.epsilon_over_lambda.reset();
  } else if (parameter == "epsilon_over_g") {
    spec.epsilon_over_g = value;
    spec.epsilon.reset();
    spec.epsilon_over_lambda.reset();
  } else if (parameter == "epsilon_over_lambda") {
    spec.epsilon_over_lambda = value;
    spec.epsilon.reset();
    spec.epsilon_over_g.reset();
  } else if (parameter == "delta_c") {
    spec.delta_c = value;
    spec.delta_c_over_g.reset();
  } else if (parameter == "delta_c_over_g") {
    spec.delta_c_over_g = value;
    spec.delta_c.reset();
  } else if (parameter == "g") {
    spec.g = value;
  } else {
    throw ConfigError("cannot sweep '" + parameter + "'");
  }
}

CommandResult dispatch(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir,
                       int jobs) {
  if (command == "compile") return run_compile(config);
  if (command == "simulate") return run_simulate(config);
  if (command == "budget") return run_budget(config);
  if (command == "validate") return run_validate(config);
  if (command == "cavity") return run_cavity(config);
  if (command == "sweep") return run_sweep(config, out_dir, jobs);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

const char* version() { return DICKE_VERSION; }

std::string format_duration(double seconds) {
  std::ostringstream os;
  os << std::setprecision(3) << seconds * 1e3 << " ms";
  return os.str();
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

CommandResult run_compile(const RunConfig& config) {
  const auto schedule = compile_config(config);
  CommandResult r;
  r.report = header("compile", config);
  r.report["schedule"] = schedule_json(schedule);
  r.files.emplace_back("schedule.json", dump(r.report));

  std::ostringstream os;
  os << "N=" << schedule.n_qubits() << ", " << schedule.segments.size() << " segment(s), total time "
     << format_duration(schedule.total_duration()) << "\n";
  if (!schedule.segments.empty()) os << segment_table(schedule);
  for (const auto& note : schedule.notes) os << "note: " << note << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_simulate(const RunConfig& config) {
  const auto schedule = compile_config(config);
  const auto result = integrate(schedule, DickeVector::ground(config.n_qubits()), config.integrator, config.frame);
  const double leakage = off_target_population(result.final_state, schedule.target.top_level());

  CommandResult r;
  r.exit_code = result.converged ? kExitOk : kExitNonConvergence;
  r.report = header("simulate", config);
  r.report["total_time_s"] = schedule.total_duration();
  r.report["fidelity"] = result.fidelity_vs_target;
  r.report["norm_drift"] = result.norm_drift;
  r.report["converged"] = result.converged;
  r.report["leakage"] = leakage;
  r.report["final_populations"] = populations(result.final_state.amplitudes());
  r.report["final_amplitudes"] = complex_list(result.final_state.amplitudes());
  r.report["stats"] = stats_json(result.stats);
  r.files.emplace_back("result.json", dump(r.report));
  if (config.write_trajectory) r.files.emplace_back("trajectory.csv", trajectory_csv(result.trajectory));

  std::ostringstream os;
  os << std::setprecision(6) << "fidelity " << result.fidelity_vs_target << ", leakage above level "
     << schedule.target.top_level() << " " << leakage << ", norm drift " << result.norm_drift << " ("
     << to_string(config.frame) << " frame, " << format_duration(schedule.total_duration()) << ")\n";
  if (!result.converged) os << "run did not converge: norm drift exceeds " << config.integrator.norm_tolerance << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_budget(const RunConfig& config) {
  const auto& p = config.params;
  if (p.g <= 0.0 || p.delta_c == 0.0 || p.T_r <= 0.0 || p.T_c <= 0.0) {
    throw ConfigError("budget needs g, delta_c, T_r and T_c");
  }
  const auto schedule = compile_config(config);
  BudgetInputs in;
  in.n_qubits = config.n_qubits();
  in.total_time = schedule.total_duration();
  in.T_r = p.T_r;
  in.T_c = p.T_c;
  in.g = p.g;
  in.delta_c = p.delta_c;
  in.lambda = p.lambda;
  in.leak_rabi = neighbour_rate(schedule);
  in.T_d_override = config.budget.T_d_override;
  in.leakage_reference = config.budget.leakage_reference;
  in.prefer_numeric = config.budget.prefer_numeric;

  CommandResult r;
  if (!config.budget.simulation_result.empty()) {
    std::ifstream file(config.budget.simulation_result);
    if (!file) throw ConfigError("cannot open simulation result '" + config.budget.simulation_result + "'");
    try {
      in.leakage_numeric = json::parse(file).at("leakage").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError("simulation result '" + config.budget.simulation_result + "': " + e.what());
    }
  } else if (config.budget.numeric_leakage) {
    const auto run = integrate(schedule, DickeVector::ground(config.n_qubits()), config.integrator);
    in.leakage_numeric = off_target_population(run.final_state, schedule.target.top_level());
    if (!run.converged) r.exit_code = kExitNonConvergence;
  }
  const auto b = make_budget(in);

  r.report = header("budget", config);
  r.report["total_time_s"] = b.total_time;
  r.report["t_d_s"] = b.t_d;
  r.report["kappa_hz"] = b.kappa;
  r.report["decoherence_infidelity"] = b.decoherence_infidelity;
  r.report["leakage_analytic"] = b.leakage_analytic;
  r.report["leakage_analytic_alt"] = b.leakage_analytic_alt;
  r.report["leakage_numeric"] = b.leakage_numeric ? json(*b.leakage_numeric) : json(nullptr);
  r.report["leakage_reference"] = b.leakage_reference ? json(*b.leakage_reference) : json(nullptr);
  r.report["leak_rabi_rad_s"] = in.leak_rabi;
  r.report["total_error"] = b.total_error;
  r.report["interpretation_flags"] = b.interpretation_flags;
  r.files.emplace_back("budget.json", dump(r.report));

  std::ostringstream os;
  os << std::setprecision(4) << "t = " << format_duration(b.total_time) << ", T_d = " << b.t_d
     << " s, kappa = " << b.kappa << " Hz\n"
     << "decoherence infidelity " << b.decoherence_infidelity << "\n"
     << "leakage (detuning 2 lambda) " << b.leakage_analytic << ", (detuning lambda) " << b.leakage_analytic_alt;
  if (b.leakage_numeric) os << ", numeric " << *b.leakage_numeric;
  if (b.leakage_reference) os << ", reference " << *b.leakage_reference;
  os << "\ntotal error " << b.total_error << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_validate(const RunConfig& config) {
  const int n = config.n_qubits();
  if (n > kOracleQubitBound) {
    throw CapacityError("validate: N=" + std::to_string(n) + " exceeds the oracle bound " +
                        std::to_string(kOracleQubitBound));
  }
  const auto& v = config.validate;
  const bool reduction = n <= 10;
  std::mt19937_64 rng(config.seed);

  std::vector<std::pair<std::string, PulseSchedule>> schedules;
  schedules.emplace_back("target", compile_config(config));
  const int segments = v.segments > 0 ? std::min(v.segments, n) : n;
  for (int i = 0; i < v.random_schedules; ++i) {
    schedules.emplace_back("random_" + std::to_string(i), random_schedule(rng, n, config.params, segments));
  }

  CommandResult r;
  r.report = header("validate", config);
  json runs = json::array();
  double worst_amp = 0.0;
  double worst_asym = 0.0;
  double worst_drift = 0.0;
  double weakest_control = std::numeric_limits<double>::infinity();
  std::vector<double> perturbed(static_cast<std::size_t>(n), 1.0);
  perturbed.front() = 1.1;
  const auto ground = DickeVector::ground(n);
  for (const auto& [name, schedule] : schedules) {
    json entry = {{"name", name}, {"segments", schedule.segments.size()}};
    if (reduction) {
      const auto rep = reduction_equivalence(schedule, config.integrator, ground);
      entry["max_amplitude_deviation"] = rep.max_amplitude_deviation;
      entry["max_population_deviation"] = rep.max_population_deviation;
      entry["max_asymmetric_population"] = rep.max_asymmetric_population;
      entry["norm_drift"] = rep.norm_drift;
      worst_amp = std::max(worst_amp, rep.max_amplitude_deviation);
      worst_asym = std::max(worst_asym, rep.max_asymmetric_population);
      worst_drift = std::max(worst_drift, rep.norm_drift);
    } else {
      const auto rep = verify_symmetry_invariance(schedule, config.integrator, ground);
      entry["max_asymmetric_population"] = rep.max_asymmetric_population;
      entry["norm_drift"] = rep.norm_drift;
      worst_asym = std::max(worst_asym, rep.max_asymmetric_population);
      worst_drift = std::max(worst_drift, rep.norm_drift);
    }
    if (v.negative_control && n >= 2 && !schedule.segments.empty()) {
      const auto control = verify_symmetry_invariance(schedule, config.integrator, ground, perturbed);
      entry["negative_control_asymmetric_population"] = control.max_asymmetric_population;
      weakest_control = std::min(weakest_control, control.max_asymmetric_population);
    }
    runs.push_back(entry);
  }

  json violations = json::array();
  if (reduction && worst_amp > v.amplitude_tolerance) violations.push_back("amplitude deviation");
  if (worst_asym > v.asymmetric_tolerance) violations.push_back("asymmetric population");
  if (worst_drift > config.integrator.norm_tolerance) violations.push_back("norm drift");
  const bool control_ran = std::isfinite(weakest_control);
  if (control_ran && weakest_control <= v.negative_control_threshold) violations.push_back("negative control");

  r.report["reduction_checked"] = reduction;
  r.report["runs"] = runs;
  r.report["max_amplitude_deviation"] = worst_amp;
  r.report["max_asymmetric_population"] = worst_asym;
  r.report["max_norm_drift"] = worst_drift;
  r.report["min_negative_control"] = control_ran ? json(weakest_control) : json(nullptr);
  r.report["violations"] = violations;
  r.report["passed"] = violations.empty();
  if (!violations.empty()) r.exit_code = kExitInvariant;
  r.files.emplace_back("validate.json", dump(r.report));

  std::ostringstream os;
  os << std::setprecision(3) << schedules.size() << " schedule(s), N=" << n;
  if (reduction) os << ": max |dc_k| " << worst_amp;
  os << ", max asymmetric population " << worst_asym << ", max norm drift " << worst_drift;
  if (control_ran) os << ", weakest negative control " << weakest_control;
  os << "\n" << (violations.empty() ? "PASS" : "FAIL") << "\n";
  for (const auto& item : violations) os << "violation: " << item.get<std::string>() << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_cavity(const RunConfig& config) {
  const auto& p = config.params;
  if (p.g <= 0.0 || p.delta_c == 0.0) throw ConfigError("cavity needs g and delta_c");
  const auto schedule = compile_config(config);
  const auto cmp = compare_models(schedule, p, config.integrator);

  CommandResult r;
  r.report = header("cavity", config);
  r.report["lambda_c_rad_s"] = cmp.lambda_c;
  r.report["fidelity_full_vs_effective"] = cmp.fidelity_full_vs_effective;
  r.report["disagreement"] = 1.0 - cmp.fidelity_full_vs_effective;
  r.report["min_fidelity"] = cmp.min_fidelity;
  r.report["max_photon_population"] = cmp.max_photon_population;
  r.report["photon_bound"] = 4.0 * std::pow(p.g / p.delta_c, 2);
  r.report["max_tail_population"] = cmp.max_tail_population;
  r.report["validity_ratio"] = cmp.validity_ratio;
  r.report["n_max_used"] = cmp.n_max_used;
  r.report["truncation_ok"] = cmp.truncation_ok;
  r.report["norm_drift"] = cmp.norm_drift;
  r.report["warnings"] = cmp.warnings;
  if (!cmp.truncation_ok) r.exit_code = kExitNonConvergence;
  r.files.emplace_back("cavity.json", dump(r.report));
  if (config.write_trajectory) {
    std::ostringstream csv;
    write_cavity_csv(csv, cmp.trajectory);
    r.files.emplace_back("cavity.csv", csv.str());
  }

  std::ostringstream os;
  os << std::setprecision(4) << "lambda_c " << cmp.lambda_c << " rad/s, full vs effective fidelity "
     << cmp.fidelity_full_vs_effective << " (min " << cmp.min_fidelity << "), peak photon population "
     << cmp.max_photon_population << ", n_max " << cmp.n_max_used << "\n";
  for (const auto& w : cmp.warnings) os << "warning: " << w << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_sweep(const RunConfig& config, const std::filesystem::path& out_dir, int jobs) {
  if (!config.sweep) throw ConfigError("sweep needs a 'sweep' section");
  const auto& sweep = *config.sweep;
  const int n = config.n_qubits();

  std::vector<std::vector<Complex>> targets;
  if (sweep.random_targets > 0) {
    const int top = sweep.random_top_level < 0 ? n : sweep.random_top_level;
    if (top < 1 || top > n) throw ConfigError("random_top_level must lie in 1..N");
    std::mt19937_64 rng(config.seed);
    for (int i = 0; i < sweep.random_targets; ++i) targets.push_back(random_target(rng, n, top).amplitudes());
  } else {
    targets.push_back(config.target);
  }
  std::vector<std::optional<double>> values(sweep.values.begin(), sweep.values.end());
  if (values.empty()) values.emplace_back();

  struct Point {
    std::optional<double> value;
    std::size_t target_index;
  };
  std::vector<Point> points;
  for (const auto& value : values)
    for (std::size_t t = 0; t < targets.size(); ++t) points.push_back({value, t});

  std::vector<CommandResult> results(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      RunConfig point = config;
      point.sweep.reset();
      point.target = targets[points[i].target_index];
      try {
        if (points[i].value) {
          apply_override(point.physical, sweep.parameter, *points[i].value);
          point.params = resolve(point.physical);
        }
      } catch (const ConfigError& e) {
        results[i].exit_code = kExitConfig;
        results[i].report = {{"error", e.what()}};
        continue;
      }
      char dir[32];
      std::snprintf(dir, sizeof dir, "point_%04zu", i);
      results[i] = run_guarded(sweep.command, point, out_dir / dir, 1);
      write_outputs(out_dir / dir, results[i]);
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CommandResult r;
  r.report = header("sweep", config);
  json list = json::array();
  std::ostringstream os;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < points.size(); ++i) {
    json result = results[i].report;
    result.erase("config");
    char dir[32];
    std::snprintf(dir, sizeof dir, "point_%04zu", i);
    json entry = {{"index", i},
                  {"directory", dir},
                  {"target_index", points[i].target_index},
                  {"exit_code", results[i].exit_code},
                  {"result", result}};
    entry["value"] = points[i].value ? json(*points[i].value) : json(nullptr);
    list.push_back(entry);
    r.exit_code = std::max(r.exit_code, results[i].exit_code);
    os << dir << " ";
    if (points[i].value) os << sweep.parameter << "=" << *points[i].value << " ";
    os << "target " << points[i].target_index << " exit " << results[i].exit_code << ": " << results[i].summary;
    if (results[i].summary.empty() || results[i].summary.back() != '\n') os << "\n";
  }
  r.report["points"] = list;
  r.files.emplace_back("sweep.json", dump(r.report));
  r.summary = os.str();
  return r;
}

CommandResult run_guarded(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir,
                          int jobs) {
  auto failed = [&](int code, const std::string& message) {
    CommandResult r;
    r.exit_code = code;
    r.report = header(command, config);
    r.report["error"] = message;
    r.summary = "error: " + message + "\n";
    return r;
  };
  try {
    return dispatch(command, config, out_dir, jobs);
  } catch (const InfeasibleTarget& e) {
    return failed(kExitInvariant, e.what());
  } catch (const IntegratorError& e) {
    return failed(kExitNonConvergence, e.what());
  } catch (const ConfigError& e) {
    return failed(kExitConfig, e.what());
  } catch (const CapacityError& e) {
    return failed(kExitConfig, e.what());
  } catch (const DomainError& e) {
    return failed(kExitConfig, e.what());
  } catch (const DimensionMismatch& e) {
    return failed(kExitConfig, e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const std::filesystem::path& out_dir, const CommandResult& result) {
  if (result.files.empty()) return;
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, contents] : result.files) write_atomic(out_dir / name, contents);
}

}  // namespace dicke::cli
