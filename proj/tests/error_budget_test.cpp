#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dicke/error_budget.hpp"
#include "dicke/errors.hpp"

namespace dicke {
namespace {

constexpr double kPi = std::numbers::pi;

struct Point {
  double g = 2 * kPi * 25e3;
  double delta_c = 10 * g;
  double lambda = g / 10;
  double epsilon = g / 100;
  double T_r = 3e-2;
  double T_c = 1e-3;
  double t = kPi / (4 * std::sqrt(3.0) * epsilon);
};

BudgetInputs cavity_inputs() {
  const Point p;
  BudgetInputs in;
  in.n_qubits = 3;
  in.total_time = p.t;
  in.T_r = p.T_r;
  in.T_c = p.T_c;
  in.g = p.g;
  in.delta_c = p.delta_c;
  in.lambda = p.lambda;
  in.leak_rabi = 2 * p.epsilon;
  return in;
}

TEST(Decoherence, CavityRate) {
  const Point p;
  EXPECT_NEAR(effective_cavity_rate(p.g, p.delta_c, p.T_c), 10.0, 1e-9);
}

TEST(Decoherence, CollectiveDecayTime) {
  EXPECT_DOUBLE_EQ(collective_decay_time(3, 3e-2), 1e-2);
  EXPECT_DOUBLE_EQ(collective_decay_time(3, 3e-2, 5e-3), 5e-3);
  EXPECT_THROW(collective_decay_time(0, 3e-2), DomainError);
}

TEST(Decoherence, CavityExample) {
  const Point p;
  const double value = decoherence_infidelity(p.t, 3, p.T_r, p.T_c, p.g, p.delta_c);
  EXPECT_NEAR(value, 3.19e-2, 0.005 * 3.19e-2);
  EXPECT_NEAR(value, p.t / 1e-2 + 10 * p.t, 1e-12);
}

TEST(Decoherence, LinearAndMonotoneInTime) {
  const Point p;
  auto f = [&](double t) { return decoherence_infidelity(t, 3, p.T_r, p.T_c, p.g, p.delta_c); };
  EXPECT_DOUBLE_EQ(f(0.0), 0.0);
  EXPECT_NEAR(f(2 * p.t), 2 * f(p.t), 1e-15);
  EXPECT_NEAR(f(p.t) + f(0.5 * p.t), f(1.5 * p.t), 1e-15);
  double last = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double v = f(i * 1e-5);
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(Leakage, ResonantLimit) {
  const double eta = 3.0;
  for (double t : {0.1, 0.4, 1.0}) {
    const double s = std::sin(eta * t);
    EXPECT_NEAR(leakage_estimate(eta, 0.0, t).value, 0.5 * s * s, 1e-15);
  }
}

TEST(Leakage, BoundedByEnvelope) {
  const double eta = 1.0;
  for (double detuning : {0.5, 2.0, 10.0}) {
    double peak = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const auto est = leakage_estimate(eta, detuning, i * 1e-3);
      EXPECT_LE(est.value, est.envelope + 1e-15);
      peak = std::max(peak, est.value);
    }
    const auto est = leakage_estimate(eta, detuning, 0.0);
    EXPECT_NEAR(est.envelope, 0.5 / (1 + detuning * detuning), 1e-15);
    EXPECT_NEAR(est.time_averaged, 0.5 * est.envelope, 1e-15);
    EXPECT_NEAR(peak, est.envelope, 1e-4);
  }
  EXPECT_DOUBLE_EQ(leakage_estimate(0.0, 0.0, 1.0).value, 0.0);
}

TEST(Leakage, FallsWithDetuning) {
  double last = 1.0;
  for (double detuning : {1.0, 2.0, 4.0, 8.0}) {
    const double env = leakage_estimate(1.0, detuning, 0.0).envelope;
    EXPECT_LT(env, last);
    last = env;
  }
}

TEST(Budget, TotalWithReferenceLeakage) {
  auto in = cavity_inputs();
  in.leakage_reference = 3.8e-3;
  const auto b = make_budget(in);
  EXPECT_NEAR(b.kappa, 10.0, 1e-9);
  EXPECT_NEAR(b.t_d, 1e-2, 1e-15);
  EXPECT_NEAR(b.total_error, 3.57e-2, 0.005 * 3.57e-2);
  EXPECT_DOUBLE_EQ(b.total_error, total_error(b.decoherence_infidelity, 3.8e-3));
  EXPECT_NE(std::find(b.interpretation_flags.begin(), b.interpretation_flags.end(), "total_error:reference_leakage"),
            b.interpretation_flags.end());
}

TEST(Budget, AnalyticLeakageVariants) {
  const auto in = cavity_inputs();
  const auto b = make_budget(in);
  EXPECT_DOUBLE_EQ(b.leakage_analytic, leakage_estimate(in.leak_rabi, 2 * in.lambda, in.total_time).value);
  EXPECT_DOUBLE_EQ(b.leakage_analytic_alt, leakage_estimate(in.leak_rabi, in.lambda, in.total_time).value);
  EXPECT_EQ(b.leakage_used, LeakageSource::Analytic);
  EXPECT_DOUBLE_EQ(b.total_error, b.decoherence_infidelity + b.leakage_analytic);
  EXPECT_FALSE(b.leakage_numeric.has_value());
}

TEST(Budget, NumericLeakageSelectedOnRequest) {
  auto in = cavity_inputs();
  in.leakage_numeric = 4.9e-3;
  auto b = make_budget(in);
  EXPECT_EQ(b.leakage_used, LeakageSource::Analytic);
  in.prefer_numeric = true;
  b = make_budget(in);
  EXPECT_EQ(b.leakage_used, LeakageSource::Numeric);
  EXPECT_DOUBLE_EQ(b.total_error, b.decoherence_infidelity + 4.9e-3);
  EXPECT_NE(std::find(b.interpretation_flags.begin(), b.interpretation_flags.end(), "total_error:numeric"),
            b.interpretation_flags.end());
}

TEST(Budget, DecayOverride) {
  auto in = cavity_inputs();
  in.T_d_override = 2e-2;
  const auto b = make_budget(in);
  EXPECT_DOUBLE_EQ(b.t_d, 2e-2);
  EXPECT_EQ(b.interpretation_flags.front(), "t_d:override");
}

}  // namespace
}  // namespace dicke
