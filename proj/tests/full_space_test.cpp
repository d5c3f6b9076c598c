#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "dicke/full_space.hpp"
#include "dicke/sampling.hpp"
#include "test_support.hpp"

namespace dicke {
namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams oracle_params() {
  PhysicalParams p;
  p.omega0 = 30.0;
  p.lambda = 1.0;
  p.epsilon = 0.5;  // strongly driven: many levels take part
  p.g = 1.0;
  p.delta_c = 10.0;
  p.T_r = 1.0;
  p.T_c = 1.0;
  return p;
}

IntegratorConfig tight() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.samples_per_segment = 10;
  return cfg;
}

StateVector random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss;
  StateVector v(dim);
  for (auto& x : v) x = Complex(gauss(rng), gauss(rng));
  return v.normalized();
}

// Reference H(t) built densely from Kronecker products in test code.
Operator brute_force_hamiltonian(int n, const PhysicalParams& p, const PulseSegment& seg, double start, double t,
                                 DriveFrame frame) {
  const Operator raise = testing::brute_force_raise(n);
  Operator h = p.lambda * raise * raise.adjoint();
  double arg = (seg.frequency - p.omega0) * (t - start) - seg.phase;
  if (frame == DriveFrame::Lab) {
    h += p.omega0 * testing::brute_force_sz(n);
    arg += p.omega0 * t;
  }
  const Complex up = std::polar(1.0, -arg);
  h += seg.amplitude * (up * raise + std::conj(up) * raise.adjoint());
  return h;
}

TEST(FullSpaceHamiltonian, MatchesBruteForceDenseAndMatrixFree) {
  const auto p = oracle_params();
  const PulseSegment seg{1, p.omega0 + 2.3, 0.4, 0.07, 1.0};
  for (int n : {1, 3, 5, 9}) {
    for (auto frame : {DriveFrame::Rotating, DriveFrame::Lab}) {
      const FullSpaceHamiltonian ham(n, p, seg, 0.2, frame);
      EXPECT_EQ(ham.is_dense(), n <= kDenseQubitLimit);
      const Operator expected = brute_force_hamiltonian(n, p, seg, 0.2, 0.73, frame);
      EXPECT_LE((ham.matrix(0.73) - expected).cwiseAbs().maxCoeff(), 1e-12) << "N=" << n;
    }
  }
}

TEST(FullSpaceHamiltonian, SingleQubitMatchesLadder) {
  const auto p = oracle_params();
  const PulseSegment seg{1, p.omega0 + 1.0, 0.3, 0.1, 1.0};
  for (auto frame : {DriveFrame::Rotating, DriveFrame::Lab}) {
    const FullSpaceHamiltonian ham(1, p, seg, 0.0, frame);
    const Operator ladder = hamiltonian_at(1, 0.4, seg, 0.0, p, frame);
    EXPECT_LE((ham.matrix(0.4) - ladder).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FullSpaceHamiltonian, CouplingAnnihilatesGround) {
  auto p = oracle_params();
  p.epsilon = 0.0;
  for (int n : {3, 10}) {
    const FullSpaceHamiltonian ham(n, p, {1, p.omega0, 0.0, 0.0, 1.0}, 0.0, DriveFrame::Rotating);
    StateVector ground = StateVector::Zero(ham.dimension());
    ground(0) = 1.0;
    StateVector out(ham.dimension());
    ham.apply(0.0, ground, out);
    EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(FullSpaceHamiltonian, DickeExpectationsAreLevelShifts) {
  auto p = oracle_params();
  p.epsilon = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const FullSpaceHamiltonian ham(n, p, {1, p.omega0, 0.0, 0.0, 1.0}, 0.0, DriveFrame::Rotating);
    for (int k = 0; k <= n; ++k) {
      const StateVector d = dicke_expansion(LadderIndex(n, k));
      StateVector hd(d.size());
      ham.apply(0.0, d, hd);
      EXPECT_NEAR(d.dot(hd).real(), level_shift(LadderIndex(n, k), p.lambda), 1e-12);
    }
  }
}

TEST(FullSpaceHamiltonian, PermutationInvariant) {
  std::mt19937_64 rng(31);
  const auto p = oracle_params();
  const PulseSegment seg{1, p.omega0 + 0.7, -0.9, 0.2, 1.0};
  for (int n = 2; n <= 6; ++n) {
    const FullSpaceHamiltonian ham(n, p, seg, 0.0, DriveFrame::Lab);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const StateVector v = random_vector(rng, ham.dimension());
        StateVector hv(v.size()), hpv(v.size());
        ham.apply(0.3, v, hv);
        ham.apply(0.3, permute_qubits(v, i, j), hpv);
        EXPECT_LE((permute_qubits(hpv, i, j) - hv).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(SymmetricProjector, IdempotentWithLadderRank) {
  for (int n = 1; n <= 8; ++n) {
    const Operator iso = dicke_isometry(n);
    const Operator proj = iso * iso.adjoint();
    EXPECT_LE((proj * proj - proj).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Operator> eig(proj);
    int rank = 0;
    for (auto v : eig.eigenvalues()) rank += v > 0.5;
    EXPECT_EQ(rank, n + 1);
  }
}

TEST(FullState, ProjectionAndAsymmetry) {
  std::mt19937_64 rng(2);
  const auto amps = testing::random_amplitudes(rng, 5);
  StateVector ladder(5);
  for (int k = 0; k < 5; ++k) ladder(k) = amps[static_cast<std::size_t>(k)];
  const auto full = FullState::from_dicke(DickeVector(4, ladder));
  EXPECT_LE((full.project_to_dicke().amplitudes() - ladder).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(full.asymmetric_population(), 1e-28);

  StateVector single = StateVector::Zero(16);
  single(0b0001) = 1.0;  // only qubit 0 excited
  const FullState product(4, single);
  EXPECT_NEAR(product.asymmetric_population(), 0.75, 1e-15);
  EXPECT_THROW(FullState(13, StateVector::Zero(2)), CapacityError);
}

TEST(SymmetryInvariance, HoldsAndNegativeControlFails) {
  std::mt19937_64 rng(41);
  const auto p = oracle_params();
  for (int n : {2, 3, 4}) {
    const auto schedule = random_schedule(rng, n, p, 2);
    const auto good = verify_symmetry_invariance(schedule, tight(), DickeVector::ground(n));
    EXPECT_LE(good.max_asymmetric_population, 1e-10);
    std::vector<double> scale(static_cast<std::size_t>(n), 1.0);
    scale[0] = 1.1;
    const auto bad = verify_symmetry_invariance(schedule, tight(), DickeVector::ground(n), scale);
    EXPECT_GT(bad.max_asymmetric_population, 1e-4);
  }
}

TEST(ReductionEquivalence, TrivialDynamics) {
  auto p = oracle_params();
  p.lambda = 0.0;
  p.epsilon = 0.0;
  PulseSchedule schedule{{{1, p.omega0, 0.0, 0.0, 2.0}}, p, TargetState(3, {1.0}), {}};
  const auto report = reduction_equivalence(schedule, tight(), DickeVector::basis(3, 2));
  EXPECT_LE(report.max_amplitude_deviation, 1e-14);
}

TEST(ReductionEquivalence, RandomSchedules) {
  std::mt19937_64 rng(43);
  const auto p = oracle_params();
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto schedule = random_schedule(rng, n, p, 2);
      const auto report = reduction_equivalence(schedule, tight(), DickeVector::ground(n));
      EXPECT_LE(report.max_amplitude_deviation, 1e-7);
      EXPECT_LE(report.max_asymmetric_population, 1e-10);
      EXPECT_LE(report.norm_drift, 1e-9);
    }
  }
}

TEST(ReductionEquivalence, GhzScheduleOnFourQubits) {
  auto p = oracle_params();
  p.epsilon = 0.01;
  const double h = 1 / std::sqrt(2.0);
  const auto schedule = compile(TargetState(4, {h, 0, 0, 0, h}), p);
  const auto report = reduction_equivalence(schedule, tight(), DickeVector::ground(4));
  EXPECT_LE(report.max_amplitude_deviation, 1e-7);
  EXPECT_NEAR(report.fidelity_full, report.fidelity_ladder, 1e-7);
  EXPECT_GT(report.fidelity_ladder, 0.99);
}

TEST(ReductionEquivalence, CapacityBound) {
  const auto p = oracle_params();
  const PulseSchedule schedule{{}, p, TargetState(11, {1.0}), {}};
  EXPECT_THROW(reduction_equivalence(schedule, tight(), DickeVector::ground(11)), CapacityError);
}

// Matrix-free path on a 10-qubit register against the ladder model.
TEST(ReductionEquivalence, MatrixFreeRegister) {
  auto p = oracle_params();
  p.epsilon = 0.1;
  std::mt19937_64 rng(47);
  const auto schedule = random_schedule(rng, 10, p, 1);
  IntegratorConfig cfg = tight();
  cfg.samples_per_segment = 4;
  const auto report = reduction_equivalence(schedule, cfg, DickeVector::ground(10));
  EXPECT_LE(report.max_amplitude_deviation, 1e-7);
}

}  // namespace
}  // namespace dicke
