#pragma once

// Explicit Runge-Kutta propagation of i d|psi>/dt = H(t)|psi>.
//
// The right-hand side is any callable `rhs(t, psi, dpsi)` writing
// dpsi = -i H(t) psi, so the same integrator serves the ladder model, the
// 2^N product-space oracle and the atom-cavity model.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "dicke/core.hpp"
#include "dicke/errors.hpp"

namespace dicke {

enum class IntegrationMethod { FixedRk4, AdaptiveDopri5 };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::AdaptiveDopri5;
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  /// Upper bound on the step size in seconds; 0 lets the caller pick one.
  double max_step = 0.0;
  /// Fixed-step mode: steps per segment. 0 derives the count from max_step.
  int fixed_steps_per_segment = 0;
  /// Trajectory samples per segment, endpoints included.
  int samples_per_segment = 20;
  /// Largest accepted |1 - <psi|psi>| before a run is flagged non-converged.
  double norm_tolerance = 1e-9;
  /// Adaptive runs abort after this many attempted steps.
  long max_attempts = 50'000'000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double smallest_step = std::numeric_limits<double>::infinity();
  double largest_step = 0.0;

  void record(double h) {
    ++accepted;
    smallest_step = std::min(smallest_step, h);
    largest_step = std::max(largest_step, h);
  }
};

/// Classical fourth-order Runge-Kutta with `steps` equal steps over [t0, t1].
template <class Rhs>
void rk4_propagate(Rhs&& rhs, StateVector& psi, double t0, double t1, long steps, StepStats& stats) {
  if (steps <= 0 || t1 <= t0) return;
  const double h = (t1 - t0) / static_cast<double>(steps);
  StateVector k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), tmp(psi.size());
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    rhs(t, psi, k1);
    tmp = psi + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = psi + (0.5 * h) * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = psi + h * k3;
    rhs(t + h, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    stats.record(h);
  }
}

/// Dormand-Prince 5(4) with FSAL and a standard step-size controller.
///
/// `h` carries the step-size guess between calls; pass 0 to let the first
/// call estimate one from the initial derivative.
template <class Rhs>
void dopri5_propagate(Rhs&& rhs, StateVector& psi, double t0, double t1, const IntegratorConfig& cfg,
                      double& h, StepStats& stats) {
  if (t1 <= t0) return;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat, the embedded error weights.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const auto n = psi.size();
  StateVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), next(n), err(n);
  const double span = t1 - t0;
  const double max_step = cfg.max_step > 0.0 ? std::min(cfg.max_step, span) : span;

  double t = t0;
  rhs(t, psi, k1);
  if (!(h > 0.0)) {
    const double d0 = psi.cwiseAbs().maxCoeff();
    const double d1 = k1.cwiseAbs().maxCoeff();
    h = (d0 > 0.0 && d1 > 0.0) ? 0.01 * d0 / d1 : 1e-6 * span;
  }
  h = std::min(h, max_step);

  long attempts = 0;
  while (t < t1) {
    bool last = false;
    double step = h;
    if (t + step >= t1 || (t1 - (t + step)) < 1e-12 * span) {
      step = t1 - t;
      last = true;
    }
    // Below this the run would need ~1e12 steps; treat it as a stall.
    if (!last && step < std::max(1e-12 * span, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(t))) {
      throw IntegratorError("dopri5: step size underflow", t, step);
    }
    if (++attempts > cfg.max_attempts) throw IntegratorError("dopri5: attempt budget exhausted", t, step);

    tmp = psi + step * (a21 * k1);
    rhs(t + c2 * step, tmp, k2);
    tmp = psi + step * (a31 * k1 + a32 * k2);
    rhs(t + c3 * step, tmp, k3);
    tmp = psi + step * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * step, tmp, k4);
    tmp = psi + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * step, tmp, k5);
    tmp = psi + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + step, tmp, k6);
    next = psi + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + step, next, k7);
    err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(psi(i)), std::abs(next(i)));
      err_norm = std::max(err_norm, std::abs(err(i)) / scale);
    }

    const double factor =
        err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
    if (err_norm <= 1.0) {
      t = last ? t1 : t + step;
      psi.swap(next);
      k1.swap(k7);
      stats.record(step);
      // A step shortened to land on t1 says nothing about the next guess.
      if (!last || factor < 1.0) h = std::min(step * factor, max_step);
    } else {
      ++stats.rejected;
      h = step * std::max(factor, 0.2);
    }
  }
}

/// Evenly spaced sample times over [t0, t1], endpoints included.
inline std::vector<double> sample_grid(double t0, double t1, int samples) {
  samples = std::max(samples, 2);
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    grid[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (samples - 1);
  }
  grid.back() = t1;
  return grid;
}

/// Propagates over one segment [t0, t1], invoking `observe(t, psi)` at every
/// sample time after t0. Fixed-step runs spread `fixed_steps` evenly across
/// the sample intervals; adaptive runs carry `h` across intervals.
template <class Rhs, class Observer>
void propagate_segment(Rhs&& rhs, StateVector& psi, double t0, double t1, const IntegratorConfig& cfg,
                       double default_max_step, double& h, StepStats& stats, Observer&& observe) {
  const auto grid = sample_grid(t0, t1, cfg.samples_per_segment);
  const auto intervals = static_cast<long>(grid.size() - 1);
  IntegratorConfig local = cfg;
  if (local.max_step <= 0.0) local.max_step = default_max_step;

  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1];
    const double b = grid[i];
    if (b > a) {
      if (cfg.method == IntegrationMethod::FixedRk4) {
        long steps = 0;
        if (cfg.fixed_steps_per_segment > 0) {
          steps = (cfg.fixed_steps_per_segment + intervals - 1) / intervals;
        } else {
          steps = std::max(1L, static_cast<long>(std::ceil((b - a) / local.max_step)));
        }
        rk4_propagate(rhs, psi, a, b, steps, stats);
      } else {
        dopri5_propagate(rhs, psi, a, b, local, h, stats);
      }
    }
    observe(b, psi);
  }
}

}  // namespace dicke
