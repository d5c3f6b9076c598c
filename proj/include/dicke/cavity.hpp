#pragma once

// Atoms in a single-mode cavity: the Tavis-Cummings model on the symmetric
// ladder times a truncated Fock space, its dispersive reduction, and a
// side-by-side integration of both under the same drive schedule.
//
// Product-space index: k * (n_max + 1) + n for atomic level k, photon number n.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dicke/dynamics.hpp"

namespace dicke {

/// Highest Fock truncation the automatic escalation will try.
inline constexpr int kMaxFockTruncation = 16;
/// Population allowed on the last Fock level before truncation is deemed too small.
inline constexpr double kFockTailTolerance = 1e-6;
/// g*sqrt(n+1)/delta_c above which the dispersive picture is flagged.
inline constexpr double kDispersiveWarningRatio = 0.2;

class AtomCavityState {
 public:
  AtomCavityState(int n_qubits, int n_max, StateVector amplitudes);
  /// Atoms in `atoms`, cavity in vacuum.
  static AtomCavityState with_vacuum(const DickeVector& atoms, int n_max);

  int n_qubits() const noexcept { return n_qubits_; }
  int n_max() const noexcept { return n_max_; }
  const StateVector& amplitudes() const noexcept { return amplitudes_; }

  Complex amplitude(int k, int n) const { return amplitudes_(k * (n_max_ + 1) + n); }
  /// <a+a>.
  double photon_number() const;
  /// Probability of 1 or more photons.
  double photon_population() const;
  /// Population of Fock level n, summed over atomic levels.
  double fock_population(int n) const;
  /// Population on the truncation edge n = n_max.
  double tail_population() const { return fock_population(n_max_); }
  /// Atomic density matrix with the cavity traced out.
  Operator reduced_atomic_state() const;
  /// <S_z + a+a>.
  double excitation_number() const;

 private:
  int n_qubits_;
  int n_max_;
  StateVector amplitudes_;
};

struct DispersiveParams {
  double lambda_c = 0.0;
  double validity_ratio = 0.0;
  std::vector<std::string> warnings;
};

/// lambda_c = g^2/delta_c and the ratio g sqrt(n+1)/delta_c.
DispersiveParams dispersive_params(const PhysicalParams& params, double mean_photons = 0.0);

/// H_f + g(a+ S- + a S+) + drive on the atoms. In the rotating frame the
/// reference is omega0 (S_z + a+a), which commutes with the exchange term and
/// leaves -delta_c a+a on the cavity.
class TavisCummingsModel {
 public:
  TavisCummingsModel(int n_qubits, const PhysicalParams& params, int n_max, DriveFrame frame = DriveFrame::Rotating);

  int n_qubits() const noexcept { return n_qubits_; }
  int n_max() const noexcept { return n_max_; }
  Eigen::Index dimension() const noexcept { return static_operator_.rows(); }
  DriveFrame frame() const noexcept { return frame_; }

  /// Drive-free part (field energies plus exchange coupling).
  const Operator& static_operator() const noexcept { return static_operator_; }
  /// Full H(t) while `segment` is active.
  Operator hamiltonian(double t, const PulseSegment& segment, double segment_start) const;
  /// S_z + a+a, conserved by the undriven model.
  Operator excitation_operator() const;
  /// a+a.
  Operator photon_number_operator() const;

  /// -i H(t) psi for one segment.
  class Generator {
   public:
    Generator(const TavisCummingsModel& model, const PulseSegment& segment, double segment_start);
    void operator()(double t, const StateVector& psi, StateVector& dpsi) const;

   private:
    const TavisCummingsModel* model_;
    double amplitude_;
    double detuning_;
    double theta_;
    double segment_start_;
  };

  /// Step bound for a segment: 1/20 of the fastest period in the model.
  double default_max_step(const PulseSegment& segment) const;

 private:
  Complex raise_factor(double t, double detuning, double theta, double segment_start) const;

  int n_qubits_;
  int n_max_;
  double omega0_;
  DriveFrame frame_;
  double fastest_rate_;
  Operator static_operator_;
  Operator atom_raise_;  // S+ (x) 1
};

/// Dispersive Hamiltonian with the cavity in vacuum: lambda_c S+S-.
Operator effective_model(int n_qubits, const PhysicalParams& params);

/// lambda_c [2 S_z (x) a+a + S+S- (x) 1] on the product space.
Operator effective_model_with_cavity(int n_qubits, const PhysicalParams& params, int n_max);

struct CavitySample {
  double time = 0.0;
  StateVector effective;          ///< effective-model amplitudes
  Eigen::VectorXd atomic_populations;  ///< full model, cavity traced out
  Eigen::VectorXd fock_populations;
  double fidelity = 0.0;  ///< <psi_eff| rho_atoms |psi_eff>
};

struct CavityComparison {
  double fidelity_full_vs_effective = 0.0;  ///< at the end of the schedule
  double min_fidelity = 1.0;                ///< worst along the trajectory
  double max_photon_population = 0.0;
  double max_tail_population = 0.0;
  double validity_ratio = 0.0;
  double lambda_c = 0.0;
  int n_max_used = 0;
  bool truncation_ok = true;
  double norm_drift = 0.0;
  std::vector<std::string> warnings;
  std::vector<CavitySample> trajectory;
};

/// Integrates `schedule` under the full model (atoms in ground, cavity in
/// vacuum) and under the effective model, escalating the Fock truncation
/// while the edge population exceeds kFockTailTolerance. The schedule must
/// have been compiled with lambda = g^2/delta_c.
CavityComparison compare_models(const PulseSchedule& schedule, const PhysicalParams& params,
                                const IntegratorConfig& config);

/// Integrates the full model alone from `initial`; the observer receives
/// every sample.
AtomCavityState integrate_cavity(const TavisCummingsModel& model, const PulseSchedule& schedule,
                                 const AtomCavityState& initial, const IntegratorConfig& config,
                                 const std::function<void(double, const AtomCavityState&)>& observe = {});

/// Columns: time_s, pop_k, re_k, im_k of the effective model, then full_pop_k,
/// photon_n and fidelity.
void write_cavity_csv(std::ostream& out, const std::vector<CavitySample>& trajectory);

}  // namespace dicke
