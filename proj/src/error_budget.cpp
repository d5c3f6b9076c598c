#include "dicke/error_budget.hpp"

#include <cmath>

#include "dicke/errors.hpp"

namespace dicke {

double effective_cavity_rate(double g, double delta_c, double T_c) {
  const double ratio = g / delta_c;
  return ratio * ratio / T_c;
}

double collective_decay_time(int n_qubits, double T_r, std::optional<double> T_d_override) {
  if (T_d_override) return *T_d_override;
  if (n_qubits < 1) throw DomainError("collective_decay_time: n_qubits must be positive");
  return T_r / n_qubits;
}

double decoherence_infidelity(double total_time, int n_qubits, double T_r, double T_c, double g, double delta_c,
                              std::optional<double> T_d_override) {
  const double t_d = collective_decay_time(n_qubits, T_r, T_d_override);
  return total_time / t_d + total_time * effective_cavity_rate(g, delta_c, T_c);
}

LeakageEstimate leakage_estimate(double step_rabi, double detuning, double duration) {
  const double eta2 = step_rabi * step_rabi;
  const double gen2 = eta2 + detuning * detuning;
  if (gen2 == 0.0) return {};
  const double envelope = 0.5 * eta2 / gen2;
  const double s = std::sin(std::sqrt(gen2) * duration);
  return {envelope * s * s, 0.5 * envelope, envelope};
}

double total_error(double decoherence, double leakage) { return decoherence + leakage; }

ErrorBudget make_budget(const BudgetInputs& in) {
  ErrorBudget b;
  b.total_time = in.total_time;
  b.t_d = collective_decay_time(in.n_qubits, in.T_r, in.T_d_override);
  b.kappa = effective_cavity_rate(in.g, in.delta_c, in.T_c);
  b.decoherence_infidelity =
      decoherence_infidelity(in.total_time, in.n_qubits, in.T_r, in.T_c, in.g, in.delta_c, in.T_d_override);
  if (in.total_time > 0.0 && in.leak_rabi > 0.0) {
    b.leakage_analytic = leakage_estimate(in.leak_rabi, 2.0 * in.lambda, in.total_time).value;
    b.leakage_analytic_alt = leakage_estimate(in.leak_rabi, in.lambda, in.total_time).value;
  }
  b.leakage_numeric = in.leakage_numeric;
  b.leakage_reference = in.leakage_reference;

  b.interpretation_flags.push_back(in.T_d_override ? "t_d:override" : "t_d:T_r/N");
  b.interpretation_flags.push_back("leakage_analytic:detuning=2*lambda");
  b.interpretation_flags.push_back("leakage_analytic_alt:detuning=lambda");

  double leakage = b.leakage_analytic;
  if (in.leakage_reference) {
    leakage = *in.leakage_reference;
    b.interpretation_flags.push_back("total_error:reference_leakage");
  } else if (in.prefer_numeric && in.leakage_numeric) {
    leakage = *in.leakage_numeric;
    b.leakage_used = LeakageSource::Numeric;
    b.interpretation_flags.push_back("total_error:numeric");
  } else {
    b.interpretation_flags.push_back("total_error:analytic");
  }
  b.total_error = total_error(b.decoherence_infidelity, leakage);
  return b;
}

}  // namespace dicke
