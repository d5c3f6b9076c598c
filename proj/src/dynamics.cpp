#include "dicke/dynamics.hpp"

#include <cstdio>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace dicke {

namespace {

constexpr Complex kI(0.0, 1.0);

/// Tridiagonal -iH(t) action for one active segment.
class LadderGenerator {
 public:
  LadderGenerator(int n_qubits, const PulseSegment& segment, double segment_start, const PhysicalParams& params,
                  DriveFrame frame)
      : segment_start_(segment_start),
        theta_(segment.phase),
        detuning_(segment.frequency - params.omega0),
        omega0_(params.omega0),
        lab_(frame == DriveFrame::Lab),
        diagonal_(level_shifts<double>(n_qubits, params.lambda)),
        coupling_(n_qubits) {
    if (lab_) diagonal_ += params.omega0 * sz_eigenvalues<double>(n_qubits);
    for (int k = 0; k < n_qubits; ++k) coupling_(k) = segment.amplitude * ladder_up_coeff(LadderIndex(n_qubits, k));
  }

  /// Phase factor multiplying S+ at time t.
  Complex raise_factor(double t) const {
    const double tau = t - segment_start_;
    const double arg = detuning_ * tau - theta_ + (lab_ ? omega0_ * t : 0.0);
    return std::polar(1.0, -arg);
  }

  void operator()(double t, const StateVector& psi, StateVector& dpsi) const {
    const Complex up = raise_factor(t);
    const Complex down = std::conj(up);
    const auto n = psi.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      Complex h_psi = diagonal_(k) * psi(k);
      if (k > 0) h_psi += coupling_(k - 1) * up * psi(k - 1);
      if (k + 1 < n) h_psi += coupling_(k) * down * psi(k + 1);
      dpsi(k) = -kI * h_psi;
    }
  }

 private:
  double segment_start_;
  double theta_;
  double detuning_;
  double omega0_;
  bool lab_;
  Eigen::VectorXd diagonal_;
  Eigen::VectorXd coupling_;
};

void check_schedule(const PulseSchedule& schedule, const DickeVector& initial) {
  if (schedule.n_qubits() != initial.n_qubits()) {
    throw DimensionMismatch("integrate: schedule has N=" + std::to_string(schedule.n_qubits()) +
                            " but the initial state has N=" + std::to_string(initial.n_qubits()));
  }
  for (const auto& seg : schedule.segments) {
    if (seg.duration < 0.0) throw DomainError("integrate: negative segment duration");
  }
}

}  // namespace

const char* to_string(DriveFrame frame) { return frame == DriveFrame::Lab ? "lab" : "rotating"; }

double fidelity(const DickeVector& a, const DickeVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("fidelity: dimensions " + std::to_string(a.dimension()) + " and " +
                            std::to_string(b.dimension()) + " differ");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

Operator hamiltonian_at(int n_qubits, double t, const PulseSegment& segment, double segment_start,
                        const PhysicalParams& params, DriveFrame frame) {
  const auto ops = collective_matrices(n_qubits);
  const LadderGenerator gen(n_qubits, segment, segment_start, params, frame);
  const Complex up = gen.raise_factor(t);
  Operator h = coupling_hamiltonian(n_qubits, params.lambda);
  if (frame == DriveFrame::Lab) h += params.omega0 * ops.sz;
  h += segment.amplitude * (up * ops.raise + std::conj(up) * ops.lower);
  return h;
}

DickeVector rotating_to_lab(const DickeVector& state, double omega0, double t) {
  const Eigen::VectorXcd phase = (-kI * omega0 * t * sz_eigenvalues<double>(state.n_qubits()).cast<Complex>())
                                     .array()
                                     .exp()
                                     .matrix();
  return DickeVector(state.n_qubits(), state.amplitudes().cwiseProduct(phase));
}

DickeVector lab_to_rotating(const DickeVector& state, double omega0, double t) {
  return rotating_to_lab(state, -omega0, t);
}

double default_max_step(int n_qubits, const PhysicalParams& params, const PulseSegment& segment,
                        DriveFrame frame) {
  const double n = n_qubits;
  double rate = std::abs(params.lambda) * (n / 2 + 1) * (n / 2 + 1) + 2.0 * std::abs(segment.amplitude) * (n / 2 + 1) +
                std::abs(segment.frequency - params.omega0);
  if (frame == DriveFrame::Lab) rate += std::abs(params.omega0) * (n / 2 + 1) + std::abs(segment.frequency);
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi / rate / 20.0;
}

SimulationResult integrate(const PulseSchedule& schedule, const DickeVector& initial, const IntegratorConfig& config,
                           DriveFrame frame) {
  check_schedule(schedule, initial);
  const int n = initial.n_qubits();
  StateVector psi = initial.amplitudes();
  const double norm0 = psi.squaredNorm();

  SimulationResult result{initial, {}, 0.0, 0.0, true, {}};
  result.trajectory.push_back({0.0, psi});
  auto observe = [&](double t, const StateVector& state) {
    result.trajectory.push_back({t, state});
    result.norm_drift = std::max(result.norm_drift, std::abs(state.squaredNorm() - norm0));
  };

  if (config.method == IntegrationMethod::AdaptiveDopri5) {
    double needed = 0.0;
    for (const auto& seg : schedule.segments) {
      if (seg.duration <= 0.0) continue;
      const double bound = default_max_step(n, schedule.params, seg, frame);
      needed += seg.duration / (config.max_step > 0.0 ? config.max_step : bound);
    }
    if (needed > static_cast<double>(config.max_attempts)) {
      char what[160];
      std::snprintf(what, sizeof what, "dopri5: the step bound implies about %.3g steps, above max_attempts = %ld",
                    needed, config.max_attempts);
      throw IntegratorError(what, 0.0, 0.0);
    }
  }

  double start = 0.0;
  double h = 0.0;
  for (const auto& seg : schedule.segments) {
    if (seg.duration > 0.0) {
      const LadderGenerator gen(n, seg, start, schedule.params, frame);
      propagate_segment(gen, psi, start, start + seg.duration, config, default_max_step(n, schedule.params, seg, frame),
                        h, result.stats, observe);
    }
    start += seg.duration;
  }

  result.final_state = DickeVector(n, psi);
  DickeVector target = schedule.target.as_dicke_vector();
  if (frame == DriveFrame::Lab) target = rotating_to_lab(target, schedule.params.omega0, start);
  result.fidelity_vs_target = fidelity(target, result.final_state);
  result.converged = result.norm_drift <= config.norm_tolerance;
  return result;
}

DickeVector propagate_exact(const PulseSchedule& schedule, const DickeVector& initial) {
  check_schedule(schedule, initial);
  const int n = initial.n_qubits();
  const auto ops = collective_matrices(n);
  const Eigen::VectorXd excitation = Eigen::VectorXd::LinSpaced(n + 1, 0.0, n);
  StateVector psi = initial.amplitudes();
  for (const auto& seg : schedule.segments) {
    if (seg.duration == 0.0) continue;
    const double detuning = seg.frequency - schedule.params.omega0;
    const Complex up = std::polar(1.0, seg.phase);
    Operator h = coupling_hamiltonian(n, schedule.params.lambda);
    h -= (detuning * excitation).cast<Complex>().asDiagonal();
    h += seg.amplitude * (up * ops.raise + std::conj(up) * ops.lower);
    const Eigen::SelfAdjointEigenSolver<Operator> eig(h);
    const Eigen::VectorXcd phases = (-kI * seg.duration * eig.eigenvalues().cast<Complex>()).array().exp().matrix();
    psi = eig.eigenvectors() * phases.asDiagonal() * (eig.eigenvectors().adjoint() * psi);
    psi = psi.cwiseProduct((-kI * detuning * seg.duration * excitation.cast<Complex>()).array().exp().matrix());
  }
  return DickeVector(n, std::move(psi));
}

double off_target_population(const DickeVector& state, int top_level) {
  double pop = 0.0;
  for (int k = top_level + 1; k < state.dimension(); ++k) pop += std::norm(state[k]);
  return pop;
}

std::vector<LeakagePoint> leakage_spectrum(const PulseSchedule& schedule, const DickeVector& initial,
                                           const IntegratorConfig& config, std::span<const double> grid) {
  std::vector<LeakagePoint> out;
  out.reserve(grid.size());
  for (const double detuning : grid) {
    PulseSchedule shifted = schedule;
    for (auto& seg : shifted.segments) seg.frequency -= detuning;
    const auto run = integrate(shifted, initial, config, DriveFrame::Rotating);
    out.push_back({detuning, off_target_population(run.final_state, schedule.target.top_level())});
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory) {
  if (trajectory.empty()) return;
  const auto dim = trajectory.front().amplitudes.size();
  out << "time_s";
  for (Eigen::Index k = 0; k < dim; ++k) out << ",pop_" << k;
  for (Eigen::Index k = 0; k < dim; ++k) out << ",re_" << k << ",im_" << k;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& sample : trajectory) {
    out << sample.time;
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << std::norm(sample.amplitudes(k));
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << sample.amplitudes(k).real() << ',' << sample.amplitudes(k).imag();
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dicke
