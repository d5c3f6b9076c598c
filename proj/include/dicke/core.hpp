#pragma once

// Symmetric Dicke ladder: basis, collective operators and the closed-form
// coefficients everything else is built on.
//
// Level k of an N-qubit register is |J,-J+k>, the symmetric state with k
// excitations (J = N/2). J itself is never stored: every formula is written
// in terms of the integers N and k.

#include <complex>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dicke/errors.hpp"

namespace dicke {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest register the 2^N brute-force routines accept by default.
inline constexpr int kOracleQubitBound = 12;

/// Position on the symmetric ladder: excitation number k of an N-qubit register.
class LadderIndex {
 public:
  LadderIndex(int n_qubits, int k) : n_qubits_(n_qubits), k_(k) {
    if (n_qubits < 1) {
      throw DomainError("LadderIndex: n_qubits must be positive, got " + std::to_string(n_qubits));
    }
    if (k < 0 || k > n_qubits) {
      throw DomainError("LadderIndex: k=" + std::to_string(k) + " outside [0, " +
                        std::to_string(n_qubits) + "]");
    }
  }

  int n_qubits() const noexcept { return n_qubits_; }
  int k() const noexcept { return k_; }
  int dimension() const noexcept { return n_qubits_ + 1; }
  bool is_top() const noexcept { return k_ == n_qubits_; }

 private:
  int n_qubits_;
  int k_;
};

/// State vector on the (N+1)-dimensional symmetric subspace.
class DickeVector {
 public:
  DickeVector(int n_qubits, StateVector amplitudes);

  /// |J,-J+k>.
  static DickeVector basis(int n_qubits, int k);
  /// |J,-J>, all qubits in the ground state.
  static DickeVector ground(int n_qubits) { return basis(n_qubits, 0); }

  int n_qubits() const noexcept { return n_qubits_; }
  int dimension() const noexcept { return n_qubits_ + 1; }
  const StateVector& amplitudes() const noexcept { return amplitudes_; }
  StateVector& amplitudes() noexcept { return amplitudes_; }
  Complex operator[](int k) const { return amplitudes_(k); }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  bool is_normalized(double tol = 1e-9) const { return std::abs(norm_squared() - 1.0) <= tol; }
  Eigen::VectorXd populations() const { return amplitudes_.cwiseAbs2(); }

 private:
  int n_qubits_;
  StateVector amplitudes_;
};

/// Physical constants of the driven, coupled register and of its cavity
/// realization. All frequencies are angular (rad/s), times in seconds.
struct PhysicalParams {
  double omega0 = 0.0;   ///< qubit transition frequency
  double lambda = 0.0;   ///< qubit-qubit coupling
  double epsilon = 0.0;  ///< drive Rabi amplitude
  double g = 0.0;        ///< atom-cavity coupling
  double delta_c = 0.0;  ///< dispersive detuning omega0 - omega_c
  double T_r = 0.0;      ///< atomic radiative lifetime
  double T_c = 0.0;      ///< cavity photon lifetime
  int n_max = 4;         ///< cavity Fock truncation

  double omega_c() const { return omega0 - delta_c; }
  /// Cavity-mediated coupling g^2/delta_c.
  double lambda_cavity() const { return g * g / delta_c; }

  /// Hard violations (non-positive rates or times, epsilon >= lambda).
  /// Empty when the parameter set is usable.
  std::vector<std::string> violations() const;
  /// Soft findings, e.g. epsilon/lambda above the selectivity threshold.
  std::vector<std::string> warnings() const;
};

/// Ratio epsilon/lambda above which selective addressing is flagged.
inline constexpr double kSelectivityWarningRatio = 0.1;

// ---------------------------------------------------------------------------
// Closed-form ladder coefficients.

/// sqrt((2J-k)(k+1)): matrix element of S+ from level k to k+1.
template <typename Real = double>
Real ladder_up_coeff(const LadderIndex& idx) {
  const auto n = static_cast<Real>(idx.n_qubits());
  const auto k = static_cast<Real>(idx.k());
  return std::sqrt((n - k) * (k + 1));
}

/// sqrt(k(2J-k+1)): matrix element of S- from level k to k-1.
template <typename Real = double>
Real ladder_down_coeff(const LadderIndex& idx) {
  const auto n = static_cast<Real>(idx.n_qubits());
  const auto k = static_cast<Real>(idx.k());
  return std::sqrt(k * (n - k + 1));
}

/// Energy shift k(2J-k+1)*lambda of level k under lambda*S+S-.
template <typename Real = double>
Real level_shift(const LadderIndex& idx, Real lambda) {
  const auto n = static_cast<Real>(idx.n_qubits());
  const auto k = static_cast<Real>(idx.k());
  return k * (n - k + 1) * lambda;
}

namespace detail {
inline void require_transition(const LadderIndex& idx, const char* op) {
  if (idx.is_top()) {
    throw DomainError(std::string(op) + ": no upward transition from the top level k=" +
                      std::to_string(idx.k()));
  }
}
}  // namespace detail

/// Effective Rabi rate of |k> <-> |k+1> for drive amplitude epsilon.
template <typename Real = double>
Real step_rabi_rate(const LadderIndex& idx, Real epsilon) {
  detail::require_transition(idx, "step_rabi_rate");
  return ladder_up_coeff<Real>(idx) * epsilon;
}

/// Transition frequency omega0 + 2(J-k)lambda of |k> -> |k+1>.
template <typename Real = double>
Real transition_frequency(const LadderIndex& idx, Real omega0, Real lambda) {
  detail::require_transition(idx, "transition_frequency");
  return omega0 + static_cast<Real>(idx.n_qubits() - 2 * idx.k()) * lambda;
}

/// Level shifts alpha_0..alpha_N as a vector.
template <typename Real = double>
Eigen::Matrix<Real, Eigen::Dynamic, 1> level_shifts(int n_qubits, Real lambda) {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> shifts(n_qubits + 1);
  for (int k = 0; k <= n_qubits; ++k) shifts(k) = level_shift<Real>(LadderIndex(n_qubits, k), lambda);
  return shifts;
}

/// S_z eigenvalues k - J for k = 0..N.
template <typename Real = double>
Eigen::Matrix<Real, Eigen::Dynamic, 1> sz_eigenvalues(int n_qubits) {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> sz(n_qubits + 1);
  for (int k = 0; k <= n_qubits; ++k) sz(k) = static_cast<Real>(k) - static_cast<Real>(n_qubits) / 2;
  return sz;
}

// ---------------------------------------------------------------------------
// Collective operators in the symmetric basis.

template <typename Scalar = Complex>
struct CollectiveOperators {
  DenseMatrix<Scalar> raise;  ///< S+
  DenseMatrix<Scalar> lower;  ///< S-
  DenseMatrix<Scalar> sz;     ///< S_z, eigenvalue k-J on level k
};

template <typename Scalar = Complex>
CollectiveOperators<Scalar> collective_matrices(int n_qubits) {
  if (n_qubits < 1) throw DomainError("collective_matrices: n_qubits must be positive");
  const int dim = n_qubits + 1;
  CollectiveOperators<Scalar> ops{DenseMatrix<Scalar>::Zero(dim, dim), DenseMatrix<Scalar>::Zero(dim, dim),
                                  DenseMatrix<Scalar>::Zero(dim, dim)};
  for (int k = 0; k < n_qubits; ++k) {
    ops.raise(k + 1, k) = Scalar(ladder_up_coeff(LadderIndex(n_qubits, k)));
  }
  ops.lower = ops.raise.adjoint();
  const auto sz = sz_eigenvalues<double>(n_qubits);
  for (int k = 0; k < dim; ++k) ops.sz(k, k) = Scalar(sz(k));
  return ops;
}

/// The coupling Hamiltonian lambda*S+S- as a diagonal matrix in the ladder basis.
Operator coupling_hamiltonian(int n_qubits, double lambda);

// ---------------------------------------------------------------------------
// Computational-basis expansion.

/// Binomial coefficient C(n, k) as a double (exact for the sizes used here).
double binomial(int n, int k);

/// Dicke state |J,-J+k> as a 2^N vector over product states. Bit j of the
/// basis index is qubit j, with 1 meaning excited.
StateVector dicke_expansion(const LadderIndex& idx, int oracle_bound = kOracleQubitBound);

/// Columns are dicke_expansion(k) for k = 0..N: an isometry from the ladder
/// into the full product space.
Operator dicke_isometry(int n_qubits, int oracle_bound = kOracleQubitBound);

}  // namespace dicke
