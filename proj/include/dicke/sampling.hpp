#pragma once

// Seeded generators for sweeps and oracle runs.

#include <random>

#include "dicke/pulse.hpp"

namespace dicke {

/// Haar-like random target over levels 0..top (complex Gaussian, normalized).
TargetState random_target(std::mt19937_64& rng, int n_qubits, int top_level);

/// `segments` consecutive ladder segments with randomized detuning (within
/// +-lambda of resonance), phase, amplitude (0.5..1.5 eps) and pulse area
/// (pi/4..pi/2). The target is the register ground state.
PulseSchedule random_schedule(std::mt19937_64& rng, int n_qubits, const PhysicalParams& params, int segments);

}  // namespace dicke
