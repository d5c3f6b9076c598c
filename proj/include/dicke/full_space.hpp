#pragma once

// Brute-force 2^N product-space simulation assembled from single-qubit terms.
// It exists to certify the (N+1)-level reduction: the same schedule is run in
// both spaces and compared level by level.

#include <cstdint>
#include <vector>

#include "dicke/dynamics.hpp"

namespace dicke {

/// Dense matrices are used up to this size, matrix-free action above it.
inline constexpr int kDenseQubitLimit = 8;

class FullState {
 public:
  FullState(int n_qubits, StateVector amplitudes);
  /// Embeds a ladder state through the Dicke isometry.
  static FullState from_dicke(const DickeVector& state);

  int n_qubits() const noexcept { return n_qubits_; }
  const StateVector& amplitudes() const noexcept { return amplitudes_; }
  StateVector& amplitudes() noexcept { return amplitudes_; }

  /// Overlaps <D_k|psi> for k = 0..N.
  DickeVector project_to_dicke() const;
  /// ||psi - P_sym psi||^2.
  double asymmetric_population() const;

 private:
  int n_qubits_;
  StateVector amplitudes_;
};

/// omega0 S_z + lambda S+S- + eps sum_j s_j [f(t) |e_j><g_j| + h.c.], built from
/// per-qubit terms. `drive_scale` holds s_j (all ones for the collective
/// drive); a non-uniform scale breaks permutation symmetry on purpose.
class FullSpaceHamiltonian {
 public:
  FullSpaceHamiltonian(int n_qubits, const PhysicalParams& params, const PulseSegment& segment, double segment_start,
                       DriveFrame frame, std::vector<double> drive_scale = {},
                       int oracle_bound = kOracleQubitBound);

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dimension() const noexcept { return Eigen::Index{1} << n_qubits_; }
  bool is_dense() const noexcept { return n_qubits_ <= kDenseQubitLimit; }

  /// out = H(t) psi.
  void apply(double t, const StateVector& psi, StateVector& out) const;
  /// -i H(t) psi, the integrator's right-hand side.
  void operator()(double t, const StateVector& psi, StateVector& dpsi) const;
  /// Materialized H(t); only meant for small N.
  Operator matrix(double t) const;

 private:
  Complex raise_factor(double t) const;
  void apply_coupling(const StateVector& psi, StateVector& out) const;
  void apply_drive(Complex up, const StateVector& psi, StateVector& out) const;

  int n_qubits_;
  double lambda_;
  double amplitude_;
  double detuning_;
  double theta_;
  double segment_start_;
  double omega0_;
  bool lab_;
  std::vector<double> drive_scale_;
  Eigen::VectorXd diagonal_;
  Operator static_part_;  // dense mode: diagonal + coupling
  Operator raise_;        // dense mode: sum_j s_j |e_j><g_j|
  mutable StateVector scratch_;
};

struct FullSpaceRun {
  FullState final_state;
  std::vector<TrajectorySample> projected;  ///< Dicke-basis overlaps per sample
  std::vector<double> asymmetric_population;
  double norm_drift = 0.0;
  StepStats stats;
};

/// Integrates `schedule` in the product space from the embedded `initial`.
FullSpaceRun integrate_full(const PulseSchedule& schedule, const DickeVector& initial, const IntegratorConfig& config,
                            DriveFrame frame = DriveFrame::Rotating, std::vector<double> drive_scale = {},
                            int oracle_bound = kOracleQubitBound);

struct SymmetryReport {
  double max_asymmetric_population = 0.0;
  double norm_drift = 0.0;
};

/// Largest population outside the symmetric subspace along the trajectory.
SymmetryReport verify_symmetry_invariance(const PulseSchedule& schedule, const IntegratorConfig& config,
                                          const DickeVector& initial, std::vector<double> drive_scale = {});

struct ReductionReport {
  double max_amplitude_deviation = 0.0;   ///< max |c_k(full) - c_k(ladder)|
  double max_population_deviation = 0.0;  ///< max ||c_k|^2 differences|
  double max_asymmetric_population = 0.0;
  double fidelity_full = 0.0;    ///< final projected state vs target
  double fidelity_ladder = 0.0;  ///< final ladder state vs target
  double norm_drift = 0.0;
};

/// Full-space trajectory projected onto the Dicke basis against the ladder
/// integration of the same schedule. N <= 10.
ReductionReport reduction_equivalence(const PulseSchedule& schedule, const IntegratorConfig& config,
                                      const DickeVector& initial);

/// Basis index with bits i and j exchanged.
std::uint64_t swap_bits(std::uint64_t s, int i, int j);
/// Applies the qubit transposition (i j) to a product-space vector.
StateVector permute_qubits(const StateVector& psi, int i, int j);

}  // namespace dicke
