#pragma once

// Closed-form error estimates for a schedule run in a cavity: decoherence
// from atomic decay and virtual cavity photons, off-resonant leakage from
// the Rabi formula, and their sum.

#include <optional>
#include <string>
#include <vector>

namespace dicke {

/// kappa = g^2 / (delta_c^2 T_c): cavity decay seen through the virtual photon
/// population, in 1/s (reported as Hz).
double effective_cavity_rate(double g, double delta_c, double T_c);

/// Collective decay time T_r / N unless overridden.
double collective_decay_time(int n_qubits, double T_r, std::optional<double> T_d_override = std::nullopt);

/// t/T_d + t*kappa.
double decoherence_infidelity(double total_time, int n_qubits, double T_r, double T_c, double g, double delta_c,
                              std::optional<double> T_d_override = std::nullopt);

struct LeakageEstimate {
  double value = 0.0;          ///< 1/2 eta^2/(eta^2+D^2) sin^2(sqrt(eta^2+D^2) t)
  double time_averaged = 0.0;  ///< same with sin^2 -> 1/2
  double envelope = 0.0;       ///< 1/2 eta^2/(eta^2+D^2), bound over all t
};

/// Rabi-formula population transferred by a drive of rate `step_rabi`
/// detuned by `detuning` after `duration`.
LeakageEstimate leakage_estimate(double step_rabi, double detuning, double duration);

enum class LeakageSource { Analytic, Numeric };

struct ErrorBudget {
  double total_time = 0.0;
  double t_d = 0.0;
  double kappa = 0.0;
  double decoherence_infidelity = 0.0;
  double leakage_analytic = 0.0;      ///< Rabi formula with the physical detuning 2*lambda
  double leakage_analytic_alt = 0.0;  ///< Rabi formula with detuning lambda
  std::optional<double> leakage_numeric;
  std::optional<double> leakage_reference;  ///< externally supplied value, used in total_error when set
  double total_error = 0.0;
  LeakageSource leakage_used = LeakageSource::Analytic;
  std::vector<std::string> interpretation_flags;
};

/// decoherence + leakage.
double total_error(double decoherence, double leakage);

struct BudgetInputs {
  int n_qubits = 0;
  double total_time = 0.0;
  double T_r = 0.0;
  double T_c = 0.0;
  double g = 0.0;
  double delta_c = 0.0;
  double lambda = 0.0;
  /// Rate of the off-resonant transition the leakage formula describes.
  double leak_rabi = 0.0;
  std::optional<double> T_d_override;
  std::optional<double> leakage_numeric;
  std::optional<double> leakage_reference;
  /// When set, total_error uses the numeric leakage instead of the analytic one.
  bool prefer_numeric = false;
};

ErrorBudget make_budget(const BudgetInputs& inputs);

}  // namespace dicke
