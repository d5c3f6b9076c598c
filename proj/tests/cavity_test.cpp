#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <numbers>
#include <random>
#include <sstream>

#include "dicke/cavity.hpp"
#include "test_support.hpp"

namespace dicke {
namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams cavity_point(double detuning_over_g = 10.0) {
  const double g = 2 * kPi * 25e3;
  PhysicalParams p;
  p.omega0 = 2 * kPi * 51e9;
  p.g = g;
  p.delta_c = detuning_over_g * g;
  p.lambda = p.lambda_cavity();
  p.epsilon = g / 100;
  p.T_r = 3e-2;
  p.T_c = 1e-3;
  return p;
}

PulseSchedule idle(int n, const PhysicalParams& p, double duration) {
  PulseSchedule s{{}, p, TargetState(n, {1.0}), {}};
  s.segments.push_back({0, p.omega0, 0.0, 0.0, duration});
  return s;
}

TEST(AtomCavityState, Layout) {
  const auto atoms = DickeVector::basis(2, 1);
  const auto s = AtomCavityState::with_vacuum(atoms, 3);
  EXPECT_EQ(s.amplitudes().size(), 12);
  EXPECT_EQ(s.amplitude(1, 0), Complex(1.0));
  EXPECT_DOUBLE_EQ(s.photon_population(), 0.0);
  EXPECT_DOUBLE_EQ(s.excitation_number(), 0.0);
  const Operator rho = s.reduced_atomic_state();
  EXPECT_NEAR(rho(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
  EXPECT_THROW(AtomCavityState(2, 3, StateVector::Zero(11)), DimensionMismatch);
}

TEST(AtomCavityState, ReducedStateOfEntangledPair) {
  StateVector amps = StateVector::Zero(2 * 3);
  amps(1 * 3 + 0) = 1 / std::sqrt(2.0);  // |e,0>
  amps(0 * 3 + 1) = 1 / std::sqrt(2.0);  // |g,1>
  const AtomCavityState s(1, 2, amps);
  const Operator rho = s.reduced_atomic_state();
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(s.photon_number(), 0.5, 1e-15);
  EXPECT_NEAR(s.fock_population(1), 0.5, 1e-15);
}

TEST(Dispersive, CouplingAndWarnings) {
  const auto p = cavity_point();
  const auto d = dispersive_params(p);
  EXPECT_NEAR(d.lambda_c, p.g / 10, 1e-9 * p.g);
  EXPECT_NEAR(d.validity_ratio, 0.1, 1e-12);
  EXPECT_TRUE(d.warnings.empty());
  EXPECT_FALSE(dispersive_params(cavity_point(3.0)).warnings.empty());
  EXPECT_FALSE(dispersive_params(p, 5.0).warnings.empty());
}

TEST(TavisCummings, Hermitian) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto p = cavity_point();
  p.omega0 = 40 * p.g;
  for (DriveFrame frame : {DriveFrame::Rotating, DriveFrame::Lab}) {
    const TavisCummingsModel model(3, p, 4, frame);
    for (int trial = 0; trial < 5; ++trial) {
      const PulseSegment seg{1, p.omega0 + p.lambda * u(rng), kPi * u(rng), p.epsilon, 1e-4};
      const Operator h = model.hamiltonian(1e-4 * (1 + u(rng)), seg, 5e-5);
      EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-9 * h.cwiseAbs().maxCoeff());
    }
  }
}

TEST(TavisCummings, SingleAtomVacuumRabi) {
  auto p = cavity_point();
  p.delta_c = 0.0;
  const TavisCummingsModel model(1, p, 3);
  const double period = kPi / p.g;
  std::vector<std::pair<double, double>> excited;
  IntegratorConfig cfg;
  cfg.samples_per_segment = 40;
  integrate_cavity(model, idle(1, p, period), AtomCavityState::with_vacuum(DickeVector::basis(1, 1), 3), cfg,
                   [&](double t, const AtomCavityState& s) { excited.emplace_back(t, std::norm(s.amplitude(1, 0))); });
  ASSERT_GT(excited.size(), 10U);
  for (const auto& [t, pe] : excited) {
    const double c = std::cos(p.g * t);
    EXPECT_NEAR(pe, c * c, 1e-8) << "t=" << t;
  }
}

TEST(TavisCummings, ExcitationConservedWithoutDrive) {
  const auto p = cavity_point(4.0);
  const TavisCummingsModel model(3, p, 6);
  std::mt19937_64 rng(5);
  const auto amps = testing::random_amplitudes(rng, 4);
  const auto initial = AtomCavityState::with_vacuum(DickeVector(3, Eigen::Map<const StateVector>(amps.data(), 4)), 6);
  const double n0 = initial.excitation_number();
  double worst = 0.0;
  integrate_cavity(model, idle(3, p, 20 * kPi / p.g), initial, {},
                   [&](double, const AtomCavityState& s) { worst = std::max(worst, std::abs(s.excitation_number() - n0)); });
  EXPECT_LT(worst, 1e-9);
  const Operator x = model.excitation_operator();
  const Operator h = model.static_operator();
  EXPECT_LT((h * x - x * h).cwiseAbs().maxCoeff(), 1e-9 * p.g);
}

TEST(TavisCummings, DecoupledCavityFactorizes) {
  auto p = cavity_point();
  p.omega0 = 40 * p.epsilon;
  p.g = 0.0;
  p.lambda = 0.0;
  p.delta_c = 5 * p.epsilon;
  const PulseSchedule s{{{0, p.omega0, 0.3, p.epsilon, 2.0 / p.epsilon},
                         {1, p.omega0 + 0.1 * p.epsilon, -1.0, 0.7 * p.epsilon, 1.5 / p.epsilon}},
                        p, TargetState(3, {1.0}), {}};
  const TavisCummingsModel model(3, p, 2, DriveFrame::Lab);
  const auto full = integrate_cavity(model, s, AtomCavityState::with_vacuum(DickeVector::ground(3), 2), {});
  const auto ladder = integrate(s, DickeVector::ground(3), {}, DriveFrame::Lab);
  EXPECT_LT(full.photon_population(), 1e-14);
  for (int k = 0; k <= 3; ++k) {
    EXPECT_NEAR(std::abs(full.amplitude(k, 0) - ladder.final_state[k]), 0.0, 1e-8) << "k=" << k;
  }
}

TEST(TavisCummings, DressedShiftApproachesDispersiveValue) {
  std::vector<double> errors;
  for (double ratio : {10.0, 20.0, 40.0}) {
    const auto p = cavity_point(ratio);
    const TavisCummingsModel model(3, p, 4);
    Eigen::SelfAdjointEigenSolver<Operator> eig(model.static_operator());
    const Eigen::Index bare = 1 * 5 + 0;
    Eigen::Index best = 0;
    eig.eigenvectors().row(bare).cwiseAbs().maxCoeff(&best);
    const double shift = eig.eigenvalues()(best);
    const double expected = level_shift(LadderIndex(3, 1), p.lambda_cavity());
    errors.push_back(std::abs(shift / expected - 1.0));
  }
  EXPECT_LT(errors[0], 0.05);
  EXPECT_LT(errors[2], 0.01);
  EXPECT_GT(errors[0], errors[1]);
  EXPECT_GT(errors[1], errors[2]);
}

TEST(EffectiveModel, MatchesCouplingHamiltonian) {
  const auto p = cavity_point();
  for (int n = 1; n <= 6; ++n) {
    const Operator eff = effective_model(n, p);
    const Operator ref = coupling_hamiltonian(n, p.g * p.g / p.delta_c);
    EXPECT_LT((eff - ref).cwiseAbs().maxCoeff(), 1e-12 * p.g) << "N=" << n;
  }
}

TEST(EffectiveModel, VacuumBlockReducesToAtomicShift) {
  const auto p = cavity_point();
  const int n_max = 3;
  const Operator full = effective_model_with_cavity(3, p, n_max);
  const Operator atoms = effective_model(3, p);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) EXPECT_NEAR(std::abs(full(i * (n_max + 1), j * (n_max + 1)) - atoms(i, j)), 0.0, 1e-9);
  // 2 S_z a+a adds 2 (k - N/2) lambda_c per photon.
  EXPECT_NEAR((full(1 * 4 + 1, 1 * 4 + 1) - atoms(1, 1)).real(), 2 * (1 - 1.5) * p.lambda_cavity(), 1e-9);
}

TEST(CompareModels, CavityExample) {
  const auto p = cavity_point();
  const auto schedule = compile(TargetState(3, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), p);
  const auto report = compare_models(schedule, p, {});
  const double bound = 4 * std::pow(p.g / p.delta_c, 2);
  EXPECT_TRUE(report.truncation_ok);
  EXPECT_LE(report.max_photon_population, bound);
  EXPECT_GT(report.fidelity_full_vs_effective, 0.95);
  EXPECT_LT(report.fidelity_full_vs_effective, 1.0 - 1e-4);
  EXPECT_LT(report.norm_drift, 1e-8);
  EXPECT_NEAR(report.lambda_c, p.g / 10, 1e-9 * p.g);

  std::ostringstream csv;
  write_cavity_csv(csv, report.trajectory);
  const auto header = csv.str().substr(0, csv.str().find('\n'));
  EXPECT_EQ(header.rfind("time_s,pop_0", 0), 0U);
  EXPECT_NE(header.find("photon_0"), std::string::npos);
  EXPECT_NE(header.find(",fidelity"), std::string::npos);
}

TEST(CompareModels, RejectsMismatchedLambda) {
  auto p = cavity_point();
  auto compiled_with = p;
  compiled_with.lambda *= 1.5;
  const auto schedule = compile(TargetState(2, {0.6, 0.8}), compiled_with);
  EXPECT_THROW(compare_models(schedule, p, {}), DomainError);
}

TEST(CompareModels, VacuumPersistsAcrossRegisters) {
  for (int n : {2, 3, 4}) {
    const auto p = cavity_point(20.0);
    std::vector<Complex> amps(static_cast<std::size_t>(n + 1), 1.0 / std::sqrt(n + 1.0));
    const auto schedule = compile(TargetState(n, amps), p);
    const auto report = compare_models(schedule, p, {});
    EXPECT_LE(report.max_photon_population, 4 * n * std::pow(p.g / p.delta_c, 2)) << "N=" << n;
  }
}

}  // namespace
}  // namespace dicke
