#include "dicke/core.hpp"

#include <bit>
#include <sstream>

namespace dicke {

DickeVector::DickeVector(int n_qubits, StateVector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  if (n_qubits < 1) throw DomainError("DickeVector: n_qubits must be positive");
  if (amplitudes_.size() != n_qubits + 1) {
    throw DimensionMismatch("DickeVector: expected " + std::to_string(n_qubits + 1) +
                            " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
}

DickeVector DickeVector::basis(int n_qubits, int k) {
  const LadderIndex idx(n_qubits, k);
  StateVector amps = StateVector::Zero(idx.dimension());
  amps(k) = 1.0;
  return DickeVector(n_qubits, std::move(amps));
}

std::vector<std::string> PhysicalParams::violations() const {
  std::vector<std::string> out;
  auto positive = [&out](double value, const char* name) {
    if (!(value > 0.0)) {
      std::ostringstream os;
      os << name << " must be strictly positive, got " << value;
      out.push_back(os.str());
    }
  };
  positive(omega0, "omega0");
  positive(lambda, "lambda");
  positive(epsilon, "epsilon");
  positive(g, "g");
  positive(delta_c, "delta_c");
  positive(T_r, "T_r");
  positive(T_c, "T_c");
  if (n_max < 1) out.push_back("n_max must be at least 1, got " + std::to_string(n_max));
  if (epsilon > 0.0 && lambda > 0.0 && epsilon >= lambda) {
    std::ostringstream os;
    os << "epsilon (" << epsilon << ") must be smaller than lambda (" << lambda << ")";
    out.push_back(os.str());
  }
  return out;
}

std::vector<std::string> PhysicalParams::warnings() const {
  std::vector<std::string> out;
  if (lambda > 0.0 && epsilon / lambda > kSelectivityWarningRatio) {
    std::ostringstream os;
    os << "epsilon/lambda = " << epsilon / lambda << " exceeds " << kSelectivityWarningRatio
       << "; off-resonant transitions are not well suppressed";
    out.push_back(os.str());
  }
  return out;
}

Operator coupling_hamiltonian(int n_qubits, double lambda) {
  return level_shifts<double>(n_qubits, lambda).cast<Complex>().asDiagonal();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

StateVector dicke_expansion(const LadderIndex& idx, int oracle_bound) {
  const int n = idx.n_qubits();
  if (n > oracle_bound) {
    throw CapacityError("dicke_expansion: N=" + std::to_string(n) + " exceeds oracle bound " +
                        std::to_string(oracle_bound));
  }
  const std::uint64_t full_dim = std::uint64_t{1} << n;
  StateVector out = StateVector::Zero(static_cast<Eigen::Index>(full_dim));
  const double amplitude = 1.0 / std::sqrt(binomial(n, idx.k()));
  for (std::uint64_t s = 0; s < full_dim; ++s) {
    if (std::popcount(s) == idx.k()) out(static_cast<Eigen::Index>(s)) = amplitude;
  }
  return out;
}

Operator dicke_isometry(int n_qubits, int oracle_bound) {
  if (n_qubits < 1) throw DomainError("dicke_isometry: n_qubits must be positive");
  if (n_qubits > oracle_bound) {
    throw CapacityError("dicke_isometry: N=" + std::to_string(n_qubits) + " exceeds oracle bound " +
                        std::to_string(oracle_bound));
  }
  Operator iso(Eigen::Index{1} << n_qubits, n_qubits + 1);
  for (int k = 0; k <= n_qubits; ++k) iso.col(k) = dicke_expansion(LadderIndex(n_qubits, k), oracle_bound);
  return iso;
}

}  // namespace dicke
