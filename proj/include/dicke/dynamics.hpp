#pragma once

// Full (N+1)-level Schroedinger integration of a drive schedule, keeping every
// off-resonant coupling the ideal two-level model drops.
//
// Drive convention: during segment m, with tau = t - t_start(m),
//
//   H_lab(t) = omega0 S_z + lambda S+S-
//            + eps [exp(-i(omega0 t + delta_m tau - theta_m)) S+ + h.c.],
//   delta_m  = omega_m - omega0.
//
// The rotating frame is the interaction picture w.r.t. omega0 S_z, which is
// the same for every segment:
//
//   H_rot(t) = lambda S+S- + eps [exp(-i(delta_m tau - theta_m)) S+ + h.c.],
//   psi_lab(t) = exp(-i omega0 S_z t) psi_rot(t).

#include <iosfwd>
#include <vector>

#include "dicke/core.hpp"
#include "dicke/integrator.hpp"
#include "dicke/pulse.hpp"

namespace dicke {

enum class DriveFrame { Lab, Rotating };

const char* to_string(DriveFrame frame);

struct TrajectorySample {
  double time = 0.0;
  StateVector amplitudes;
};

struct SimulationResult {
  DickeVector final_state;
  std::vector<TrajectorySample> trajectory;
  double norm_drift = 0.0;
  double fidelity_vs_target = 0.0;
  bool converged = true;
  StepStats stats;
};

/// |<a|b>|^2.
double fidelity(const DickeVector& a, const DickeVector& b);

/// Hamiltonian at absolute time t while `segment` (which started at
/// `segment_start`) is active.
Operator hamiltonian_at(int n_qubits, double t, const PulseSegment& segment, double segment_start,
                        const PhysicalParams& params, DriveFrame frame);

/// Converts a rotating-frame state at time t into the lab frame (and back).
DickeVector rotating_to_lab(const DickeVector& state, double omega0, double t);
DickeVector lab_to_rotating(const DickeVector& state, double omega0, double t);

/// Step bound used when the config leaves max_step at 0: 1/20 of the
/// fastest period present in the Hamiltonian of the given frame.
double default_max_step(int n_qubits, const PhysicalParams& params, const PulseSegment& segment,
                        DriveFrame frame);

/// Integrates the schedule from `initial` (given in `frame`). The target is
/// mapped into the same frame at the final time before the overlap is taken.
/// Throws IntegratorError on step-size underflow.
SimulationResult integrate(const PulseSchedule& schedule, const DickeVector& initial,
                           const IntegratorConfig& config = {}, DriveFrame frame = DriveFrame::Rotating);

/// Exact piecewise propagation through eigendecomposition of the constant
/// Hamiltonian seen in each segment's drive frame. Rotating-frame result;
/// used as a reference for the Runge-Kutta paths.
DickeVector propagate_exact(const PulseSchedule& schedule, const DickeVector& initial);

struct LeakagePoint {
  double detuning = 0.0;   ///< omega_transition - omega_drive, rad/s
  double off_target = 0.0; ///< population above the target's top level
};

/// Population that ends up above the target's highest level.
double off_target_population(const DickeVector& state, int top_level);

/// Re-runs the schedule with every drive frequency lowered by each detuning
/// in `grid` (so +2 lambda lands on the next transition up the ladder).
std::vector<LeakagePoint> leakage_spectrum(const PulseSchedule& schedule, const DickeVector& initial,
                                           const IntegratorConfig& config, std::span<const double> grid);

/// CSV with columns time_s, pop_0..pop_N, re_0, im_0, ..., re_N, im_N.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory);

}  // namespace dicke
