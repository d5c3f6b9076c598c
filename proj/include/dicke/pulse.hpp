#pragma once

// Sequential two-level compiler: turns a target superposition over the
// symmetric ladder into a piecewise-constant drive schedule.
//
// Segment m (1-based) drives |m-1> <-> |m> at its transition frequency. Its
// duration fixes how much amplitude stays on level m-1; its phase fixes the
// phase of the amplitude that lands on level m.

#include <span>
#include <string>
#include <vector>

#include "dicke/core.hpp"

namespace dicke {

/// Normalized target d_0..d_K over the lowest K+1 ladder levels (K <= N).
///
/// The whole vector is multiplied by a global phase so that d_0 is real and
/// nonnegative; the removed phase is kept in global_phase().
class TargetState {
 public:
  TargetState(int n_qubits, std::vector<Complex> amplitudes, double norm_tol = 1e-9);

  int n_qubits() const noexcept { return n_qubits_; }
  /// Highest ladder level with an explicit amplitude.
  int top_level() const noexcept { return static_cast<int>(amplitudes_.size()) - 1; }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  /// Phase removed from the user's input; input = exp(i*global_phase) * amplitudes.
  double global_phase() const noexcept { return global_phase_; }

  /// Target padded to the full ladder.
  DickeVector as_dicke_vector() const;

 private:
  int n_qubits_;
  std::vector<Complex> amplitudes_;
  double global_phase_ = 0.0;
};

struct PulseSegment {
  int step_index = 0;      ///< m = 1..K
  double frequency = 0.0;  ///< rad/s
  double phase = 0.0;      ///< rad, referenced to the segment start
  double amplitude = 0.0;  ///< rad/s
  double duration = 0.0;   ///< s
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;
  PhysicalParams params;
  TargetState target;
  std::vector<std::string> notes;

  int n_qubits() const noexcept { return target.n_qubits(); }
  double total_duration() const;
  /// Start time of each segment, plus the end time as the last entry.
  std::vector<double> boundaries() const;
};

/// Compiles `target` for the register described by `params`.
///
/// Throws InfeasibleTarget when the remaining amplitude vanishes while later
/// levels are still populated, and DomainError when K exceeds N.
PulseSchedule compile(const TargetState& target, const PhysicalParams& params);

/// Accumulated phase of the amplitude on every level after the given segments
/// have run from |J,-J> under the ideal two-level model. Levels that are not
/// yet populated report 0.
std::vector<double> phase_ledger(int n_qubits, double lambda, std::span<const PulseSegment> executed);

/// Closed-form ideal evolution: each segment acts as an exact two-level
/// rotation on its resonant pair, every level also picks up exp(-i alpha_k t).
DickeVector simulate_ideal(const PulseSchedule& schedule, const DickeVector& initial);
DickeVector simulate_ideal(const PulseSchedule& schedule);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace dicke
