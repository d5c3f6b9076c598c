#include "dicke/sampling.hpp"

#include <numbers>

namespace dicke {

TargetState random_target(std::mt19937_64& rng, int n_qubits, int top_level) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> amps(static_cast<std::size_t>(top_level) + 1);
  double norm2 = 0.0;
  for (auto& a : amps) {
    a = Complex(gauss(rng), gauss(rng));
    norm2 += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm2);
  return TargetState(n_qubits, std::move(amps));
}

PulseSchedule random_schedule(std::mt19937_64& rng, int n_qubits, const PhysicalParams& params, int segments) {
  if (segments > n_qubits) throw DomainError("random_schedule: more segments than ladder transitions");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PulseSchedule schedule{{}, params, TargetState(n_qubits, {1.0}), {}};
  for (int m = 1; m <= segments; ++m) {
    const LadderIndex lower(n_qubits, m - 1);
    const double amplitude = params.epsilon * (0.5 + unit(rng));
    const double rabi = step_rabi_rate(lower, amplitude);
    schedule.segments.push_back({m,
                                 transition_frequency(lower, params.omega0, params.lambda) +
                                     params.lambda * (2.0 * unit(rng) - 1.0),
                                 std::numbers::pi * (2.0 * unit(rng) - 1.0), amplitude,
                                 (0.5 + 0.5 * unit(rng)) * std::numbers::pi / (2.0 * rabi)});
  }
  return schedule;
}

}  // namespace dicke
