#include "dicke/pulse.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dicke {

namespace {

constexpr double kDegenerateRemainder = 1e-12;

}  // namespace

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  if (wrapped > std::numbers::pi) wrapped -= two_pi;
  return wrapped;
}

TargetState::TargetState(int n_qubits, std::vector<Complex> amplitudes, double norm_tol)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  if (n_qubits < 1) throw DomainError("TargetState: n_qubits must be positive");
  if (amplitudes_.empty()) throw DomainError("TargetState: empty amplitude list");
  if (top_level() > n_qubits) {
    throw DomainError("TargetState: out-of-ladder target, K=" + std::to_string(top_level()) +
                      " exceeds N=" + std::to_string(n_qubits));
  }
  double norm2 = 0.0;
  for (const auto& d : amplitudes_) norm2 += std::norm(d);
  if (std::abs(norm2 - 1.0) > norm_tol) {
    std::ostringstream os;
    os.precision(12);
    os << "TargetState: amplitudes are not normalized, sum |d_k|^2 = " << norm2
       << " (norm " << std::sqrt(norm2) << ")";
    throw DomainError(os.str());
  }
  if (std::abs(amplitudes_.front()) > 0.0) global_phase_ = std::arg(amplitudes_.front());
  const Complex rephase = std::polar(1.0 / std::sqrt(norm2), -global_phase_);
  for (auto& d : amplitudes_) d *= rephase;
  amplitudes_.front() = std::abs(amplitudes_.front());
}

DickeVector TargetState::as_dicke_vector() const {
  StateVector amps = StateVector::Zero(n_qubits_ + 1);
  for (int k = 0; k <= top_level(); ++k) amps(k) = amplitudes_[static_cast<std::size_t>(k)];
  return DickeVector(n_qubits_, std::move(amps));
}

double PulseSchedule::total_duration() const {
  return std::accumulate(segments.begin(), segments.end(), 0.0,
                         [](double acc, const PulseSegment& s) { return acc + s.duration; });
}

std::vector<double> PulseSchedule::boundaries() const {
  std::vector<double> out;
  out.reserve(segments.size() + 1);
  double t = 0.0;
  out.push_back(t);
  for (const auto& s : segments) {
    t += s.duration;
    out.push_back(t);
  }
  return out;
}

std::vector<double> phase_ledger(int n_qubits, double lambda, std::span<const PulseSegment> executed) {
  std::vector<double> phases(static_cast<std::size_t>(n_qubits) + 1, 0.0);
  const auto alpha = level_shifts<double>(n_qubits, lambda);
  int populated = 0;
  for (const auto& seg : executed) {
    const int lower = seg.step_index - 1;
    if (lower != populated || lower >= n_qubits) {
      throw DomainError("phase_ledger: segments must drive consecutive levels starting from 0");
    }
    const int upper = lower + 1;
    phases[upper] = phases[lower] + seg.phase - std::numbers::pi / 2 - alpha(upper) * seg.duration;
    for (int j = 0; j <= lower; ++j) phases[j] -= alpha(j) * seg.duration;
    populated = upper;
  }
  return phases;
}

PulseSchedule compile(const TargetState& target, const PhysicalParams& params) {
  const int n = target.n_qubits();
  const int top = target.top_level();
  if (top > n) {
    throw DomainError("compile: out-of-ladder target, K=" + std::to_string(top) + " > N=" + std::to_string(n));
  }
  if (top > 0 && !(params.epsilon > 0.0)) throw DomainError("compile: epsilon must be positive");

  PulseSchedule schedule{{}, params, target, params.warnings()};
  if (target.global_phase() != 0.0) {
    std::ostringstream os;
    os << "global phase " << target.global_phase() << " rad removed so that d_0 is real";
    schedule.notes.push_back(os.str());
  }

  const auto& d = target.amplitudes();
  // tail[m] = sqrt(sum_{j >= m} |d_j|^2), the amplitude not yet placed before level m.
  std::vector<double> tail(d.size() + 1, 0.0);
  for (int j = top; j >= 0; --j) tail[j] = std::sqrt(tail[j + 1] * tail[j + 1] + std::norm(d[j]));

  schedule.segments.reserve(static_cast<std::size_t>(top));
  for (int m = 1; m <= top; ++m) {
    const LadderIndex lower(n, m - 1);
    const double rabi = step_rabi_rate(lower, params.epsilon);
    const double remaining = tail[m - 1];
    double duration = 0.0;
    if (remaining < kDegenerateRemainder) {
      for (int j = m; j <= top; ++j) {
        if (std::abs(d[j]) > 0.0) {
          throw InfeasibleTarget("compile: remaining amplitude " + std::to_string(remaining) +
                                 " vanishes before level " + std::to_string(j) + " is loaded");
        }
      }
    } else {
      const double keep = std::clamp(std::abs(d[m - 1]) / remaining, 0.0, 1.0);
      duration = std::acos(keep) / rabi;
    }
    schedule.segments.push_back(
        {m, transition_frequency(lower, params.omega0, params.lambda), 0.0, params.epsilon, duration});
  }

  // Phases need every later duration, because populated levels keep
  // precessing under the coupling while higher levels are loaded.
  const auto alpha = level_shifts<double>(n, params.lambda);
  for (int m = 1; m <= top; ++m) {
    const auto ledger = phase_ledger(n, params.lambda, std::span(schedule.segments).first(m - 1));
    double later_time = 0.0;
    for (int i = m; i <= top; ++i) later_time += schedule.segments[i - 1].duration;
    const double wanted = std::arg(d[m]);
    schedule.segments[m - 1].phase =
        wrap_phase(wanted + alpha(m) * later_time - ledger[m - 1] + std::numbers::pi / 2);
  }
  return schedule;
}

DickeVector simulate_ideal(const PulseSchedule& schedule, const DickeVector& initial) {
  const int n = initial.n_qubits();
  if (n != schedule.n_qubits()) throw DimensionMismatch("simulate_ideal: schedule and state disagree on N");
  const Eigen::VectorXcd alpha = level_shifts<double>(n, schedule.params.lambda).cast<Complex>();
  StateVector psi = initial.amplitudes();
  const Complex minus_i(0.0, -1.0);
  for (const auto& seg : schedule.segments) {
    const int lower = seg.step_index - 1;
    if (lower < 0 || lower >= n) throw DomainError("simulate_ideal: segment drives a level outside the ladder");
    const double rabi = step_rabi_rate(LadderIndex(n, lower), seg.amplitude);
    const double c = std::cos(rabi * seg.duration);
    const double s = std::sin(rabi * seg.duration);
    const Complex a = psi(lower);
    const Complex b = psi(lower + 1);
    psi(lower) = c * a + minus_i * std::polar(s, -seg.phase) * b;
    psi(lower + 1) = minus_i * std::polar(s, seg.phase) * a + c * b;
    psi = psi.cwiseProduct((minus_i * alpha * seg.duration).array().exp().matrix());
  }
  return DickeVector(n, std::move(psi));
}

DickeVector simulate_ideal(const PulseSchedule& schedule) {
  return simulate_ideal(schedule, DickeVector::ground(schedule.n_qubits()));
}

}  // namespace dicke
