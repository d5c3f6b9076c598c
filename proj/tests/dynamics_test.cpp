#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "dicke/dynamics.hpp"
#include "test_support.hpp"

namespace dicke {
namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams cavity_point() {
  const double g = 2 * kPi * 25e3;
  PhysicalParams p;
  p.omega0 = 2 * kPi * 51e9;
  p.g = g;
  p.delta_c = 10 * g;
  p.lambda = p.lambda_cavity();
  p.epsilon = g / 100;
  p.T_r = 3e-2;
  p.T_c = 1e-3;
  return p;
}

PulseSchedule cavity_example() {
  return compile(TargetState(3, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), cavity_point());
}

TEST(Fidelity, Basics) {
  const auto a = DickeVector::basis(1, 0);
  const auto b = DickeVector::basis(1, 1);
  EXPECT_DOUBLE_EQ(fidelity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(fidelity(a, b), 0.0);
  StateVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(fidelity(DickeVector(1, plus), a), 0.5, 1e-15);
  EXPECT_THROW(fidelity(a, DickeVector::ground(2)), DimensionMismatch);
}

TEST(HamiltonianAt, UndrivenIsDiagonal) {
  auto p = cavity_point();
  p.omega0 = 50.0;
  PulseSegment seg{1, p.omega0 + 3 * p.lambda, 0.2, 0.0, 1e-3};
  const auto rot = hamiltonian_at(3, 1e-4, seg, 0.0, p, DriveFrame::Rotating);
  const auto lab = hamiltonian_at(3, 1e-4, seg, 0.0, p, DriveFrame::Lab);
  for (int k = 0; k <= 3; ++k) {
    const double alpha = level_shift(LadderIndex(3, k), p.lambda);
    EXPECT_NEAR(rot(k, k).real(), alpha, 1e-9);
    EXPECT_NEAR(lab(k, k).real(), alpha + (k - 1.5) * p.omega0, 1e-9);
  }
  EXPECT_TRUE(rot.isDiagonal());
  EXPECT_TRUE(lab.isDiagonal());
}

TEST(HamiltonianAt, Hermitian) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1e-3);
  auto p = cavity_point();
  p.omega0 = 1e6;
  for (int trial = 0; trial < 50; ++trial) {
    const PulseSegment seg{1, p.omega0 + u(rng) * 1e7, u(rng) * 6e3, p.epsilon, 1e-3};
    for (auto frame : {DriveFrame::Lab, DriveFrame::Rotating}) {
      const auto h = hamiltonian_at(4, u(rng), seg, u(rng), p, frame);
      EXPECT_LE((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * h.cwiseAbs().maxCoeff());
    }
  }
}

// In the frame that also removes the level shifts, the resonant element is
// static and the next one oscillates at 2 lambda.
TEST(HamiltonianAt, NetOscillationFrequencies) {
  const auto p = cavity_point();
  const PulseSegment seg{1, transition_frequency(LadderIndex(3, 0), p.omega0, p.lambda), 0.0, p.epsilon, 1.0};
  const double dt = 1e-7;
  const auto h0 = hamiltonian_at(3, 0.0, seg, 0.0, p, DriveFrame::Rotating);
  const auto h1 = hamiltonian_at(3, dt, seg, 0.0, p, DriveFrame::Rotating);
  auto net_rate = [&](int k) {
    const double phase_rate = std::arg(h1(k + 1, k) / h0(k + 1, k)) / dt;
    return phase_rate + (h0(k + 1, k + 1) - h0(k, k)).real();
  };
  EXPECT_NEAR(net_rate(0), 0.0, 1e-6 * p.lambda);
  EXPECT_NEAR(std::abs(net_rate(1)), 2 * p.lambda, 1e-6 * p.lambda);
}

TEST(Integrate, ZeroDurationReturnsInitial) {
  const auto p = cavity_point();
  const auto schedule = compile(TargetState(3, {0.6, 0.8, 0.0}), p);
  PulseSchedule zero = schedule;
  for (auto& seg : zero.segments) seg.duration = 0.0;
  const auto initial = DickeVector::ground(3);
  const auto run = integrate(zero, initial);
  EXPECT_EQ(run.final_state.amplitudes(), initial.amplitudes());
  EXPECT_NEAR(run.fidelity_vs_target, 0.36, 1e-15);
  EXPECT_EQ(run.trajectory.size(), 1u);
}

TEST(Integrate, RejectsMismatchedRegister) {
  EXPECT_THROW(integrate(cavity_example(), DickeVector::ground(2)), DimensionMismatch);
}

TEST(Integrate, CavityExampleLeakage) {
  const auto run = integrate(cavity_example(), DickeVector::ground(3));
  const double leak = std::norm(run.final_state[2]);
  EXPECT_GE(leak, 5e-4);
  EXPECT_LE(leak, 2e-2);
  EXPECT_LE(run.fidelity_vs_target, 1.0 - leak + 1e-6);
  EXPECT_GT(run.fidelity_vs_target, 0.98);
  EXPECT_LE(run.norm_drift, 1e-9);
  EXPECT_TRUE(run.converged);
}

TEST(Integrate, AgreesWithExactPropagator) {
  std::mt19937_64 rng(11);
  auto p = cavity_point();
  p.epsilon = p.lambda / 20;
  for (int trial = 0; trial < 10; ++trial) {
    const auto schedule = compile(TargetState(4, testing::random_amplitudes(rng, 4)), p);
    const auto rk = integrate(schedule, DickeVector::ground(4));
    const auto exact = propagate_exact(schedule, DickeVector::ground(4));
    EXPECT_LE((rk.final_state.amplitudes() - exact.amplitudes()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Integrate, StrongCouplingLimitIsIdeal) {
  std::mt19937_64 rng(5);
  auto p = cavity_point();
  p.epsilon = p.lambda * 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    const auto schedule = compile(TargetState(3, testing::random_amplitudes(rng, 3)), p);
    ASSERT_EQ(schedule.segments.size(), 2u);
    EXPECT_GE(fidelity(propagate_exact(schedule, DickeVector::ground(3)), schedule.target.as_dicke_vector()),
              1 - 1e-6);
  }
  const auto schedule = compile(TargetState(3, testing::random_amplitudes(rng, 3)), p);
  EXPECT_GE(integrate(schedule, DickeVector::ground(3)).fidelity_vs_target, 1 - 1e-6);
}

TEST(Integrate, FrameEquivalence) {
  auto p = cavity_point();
  p.omega0 = 40 * p.lambda;  // artificially small so the lab frame stays tractable
  std::mt19937_64 rng(19);
  const auto schedule = compile(TargetState(3, testing::random_amplitudes(rng, 3)), p);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  const auto rot = integrate(schedule, DickeVector::ground(3), cfg, DriveFrame::Rotating);
  const auto lab = integrate(schedule, DickeVector::ground(3), cfg, DriveFrame::Lab);
  ASSERT_EQ(rot.trajectory.size(), lab.trajectory.size());
  for (std::size_t i = 0; i < rot.trajectory.size(); ++i) {
    const auto& a = rot.trajectory[i];
    const auto& b = lab.trajectory[i];
    EXPECT_DOUBLE_EQ(a.time, b.time);
    EXPECT_LE((a.amplitudes.cwiseAbs2() - b.amplitudes.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-7);
  }
  const auto mapped = rotating_to_lab(rot.final_state, p.omega0, schedule.total_duration());
  EXPECT_LE((mapped.amplitudes() - lab.final_state.amplitudes()).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_NEAR(rot.fidelity_vs_target, lab.fidelity_vs_target, 1e-7);
}

TEST(Integrate, CompilerValidationAtSmallRatio) {
  std::mt19937_64 rng(23);
  auto p = cavity_point();
  p.epsilon = p.lambda * 1e-2;
  for (int trial = 0; trial < 50; ++trial) {
    const int top = 1 + trial % 3;
    const auto schedule = compile(TargetState(3, testing::random_amplitudes(rng, top + 1)), p);
    EXPECT_GE(integrate(schedule, DickeVector::ground(3)).fidelity_vs_target, 0.99);
  }
}

TEST(Integrate, FixedStepIsFourthOrder) {
  const auto schedule = cavity_example();
  const auto reference = propagate_exact(schedule, DickeVector::ground(3));
  IntegratorConfig cfg;
  cfg.method = IntegrationMethod::FixedRk4;
  cfg.samples_per_segment = 2;
  auto error_with = [&](int steps) {
    cfg.fixed_steps_per_segment = steps;
    const auto run = integrate(schedule, DickeVector::ground(3), cfg);
    return (run.final_state.amplitudes() - reference.amplitudes()).cwiseAbs().maxCoeff();
  };
  const double ratio = error_with(200) / error_with(400);
  EXPECT_NEAR(ratio, 16.0, 4.0);
}

TEST(Integrate, StepUnderflowIsReported) {
  const auto schedule = cavity_example();
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-30;
  cfg.abs_tol = 1e-30;
  EXPECT_THROW(integrate(schedule, DickeVector::ground(3), cfg), IntegratorError);
}

TEST(LeakageSpectrum, OnResonanceMatchesIntegrate) {
  const auto schedule = cavity_example();
  const std::vector<double> grid{0.0};
  const auto spectrum = leakage_spectrum(schedule, DickeVector::ground(3), {}, grid);
  const auto run = integrate(schedule, DickeVector::ground(3));
  EXPECT_NEAR(spectrum[0].off_target, off_target_population(run.final_state, 1), 1e-12);
}

TEST(LeakageSpectrum, PeaksAtNextTransition) {
  const auto schedule = cavity_example();
  const double lambda = schedule.params.lambda;
  const std::vector<double> grid{0.0, lambda, 2 * lambda, 3 * lambda, 4 * lambda};
  const auto spectrum = leakage_spectrum(schedule, DickeVector::basis(3, 1), {}, grid);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (spectrum[i].off_target > spectrum[peak].off_target) peak = i;
  EXPECT_EQ(peak, 2u);
}

TEST(LeakageSpectrum, ScalesQuadraticallyWithRatio) {
  auto p = cavity_point();
  std::vector<double> ratios{1e-1, 1.0 / 30, 1e-2};
  std::vector<double> leaks;
  const std::vector<double> grid{0.0};
  for (double r : ratios) {
    p.epsilon = p.lambda * r;
    const auto schedule = compile(TargetState(3, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), p);
    leaks.push_back(leakage_spectrum(schedule, DickeVector::ground(3), {}, grid)[0].off_target);
  }
  EXPECT_GT(leaks[0], leaks[1]);
  EXPECT_GT(leaks[1], leaks[2]);
  EXPECT_NEAR(testing::log_log_slope(ratios, leaks), 2.0, 0.4);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const auto run = integrate(cavity_example(), DickeVector::ground(3));
  std::ostringstream os;
  write_trajectory_csv(os, run.trajectory);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "time_s,pop_0,pop_1,pop_2,pop_3,re_0,im_0,re_1,im_1,re_2,im_2,re_3,im_3");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_EQ(rows, run.trajectory.size());
}

}  // namespace
}  // namespace dicke
