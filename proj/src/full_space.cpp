#include "dicke/full_space.hpp"

#include <bit>

namespace dicke {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr int kReductionQubitBound = 10;

void require_capacity(int n_qubits, int bound, const char* op) {
  if (n_qubits < 1) throw DomainError(std::string(op) + ": n_qubits must be positive");
  if (n_qubits > bound) {
    throw CapacityError(std::string(op) + ": N=" + std::to_string(n_qubits) + " exceeds the bound " +
                        std::to_string(bound));
  }
}

}  // namespace

std::uint64_t swap_bits(std::uint64_t s, int i, int j) {
  const auto bi = (s >> i) & 1U;
  const auto bj = (s >> j) & 1U;
  if (bi == bj) return s;
  return s ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j));
}

StateVector permute_qubits(const StateVector& psi, int i, int j) {
  StateVector out(psi.size());
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    out(static_cast<Eigen::Index>(swap_bits(static_cast<std::uint64_t>(s), i, j))) = psi(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

FullState::FullState(int n_qubits, StateVector amplitudes) : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  require_capacity(n_qubits, kOracleQubitBound, "FullState");
  if (amplitudes_.size() != (Eigen::Index{1} << n_qubits)) {
    throw DimensionMismatch("FullState: expected 2^" + std::to_string(n_qubits) + " amplitudes");
  }
}

FullState FullState::from_dicke(const DickeVector& state) {
  require_capacity(state.n_qubits(), kOracleQubitBound, "FullState::from_dicke");
  StateVector full = StateVector::Zero(Eigen::Index{1} << state.n_qubits());
  for (int k = 0; k < state.dimension(); ++k) {
    if (state[k] != Complex(0.0)) full += state[k] * dicke_expansion(LadderIndex(state.n_qubits(), k));
  }
  return FullState(state.n_qubits(), std::move(full));
}

DickeVector FullState::project_to_dicke() const {
  // <D_k|psi> = C(N,k)^{-1/2} * sum of amplitudes with Hamming weight k.
  StateVector sums = StateVector::Zero(n_qubits_ + 1);
  for (Eigen::Index s = 0; s < amplitudes_.size(); ++s) {
    sums(std::popcount(static_cast<std::uint64_t>(s))) += amplitudes_(s);
  }
  for (int k = 0; k <= n_qubits_; ++k) sums(k) /= std::sqrt(binomial(n_qubits_, k));
  return DickeVector(n_qubits_, std::move(sums));
}

double FullState::asymmetric_population() const {
  // Within each weight sector the symmetric part is the sector mean.
  StateVector means = StateVector::Zero(n_qubits_ + 1);
  for (Eigen::Index s = 0; s < amplitudes_.size(); ++s) {
    means(std::popcount(static_cast<std::uint64_t>(s))) += amplitudes_(s);
  }
  for (int k = 0; k <= n_qubits_; ++k) means(k) /= binomial(n_qubits_, k);
  double residual = 0.0;
  for (Eigen::Index s = 0; s < amplitudes_.size(); ++s) {
    residual += std::norm(amplitudes_(s) - means(std::popcount(static_cast<std::uint64_t>(s))));
  }
  return residual;
}

// ---------------------------------------------------------------------------

FullSpaceHamiltonian::FullSpaceHamiltonian(int n_qubits, const PhysicalParams& params, const PulseSegment& segment,
                                           double segment_start, DriveFrame frame, std::vector<double> drive_scale,
                                           int oracle_bound)
    : n_qubits_(n_qubits),
      lambda_(params.lambda),
      amplitude_(segment.amplitude),
      detuning_(segment.frequency - params.omega0),
      theta_(segment.phase),
      segment_start_(segment_start),
      omega0_(params.omega0),
      lab_(frame == DriveFrame::Lab),
      drive_scale_(std::move(drive_scale)) {
  require_capacity(n_qubits, oracle_bound, "FullSpaceHamiltonian");
  if (drive_scale_.empty()) drive_scale_.assign(static_cast<std::size_t>(n_qubits), 1.0);
  if (static_cast<int>(drive_scale_.size()) != n_qubits) {
    throw DimensionMismatch("FullSpaceHamiltonian: drive_scale needs one entry per qubit");
  }
  const Eigen::Index dim = dimension();
  diagonal_ = Eigen::VectorXd::Zero(dim);
  if (lab_) {
    for (Eigen::Index s = 0; s < dim; ++s) {
      diagonal_(s) = omega0_ * (std::popcount(static_cast<std::uint64_t>(s)) - 0.5 * n_qubits);
    }
  }
  scratch_.resize(dim);

  if (is_dense()) {
    raise_ = Operator::Zero(dim, dim);
    Operator raise_uniform = Operator::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
      for (int j = 0; j < n_qubits; ++j) {
        const Eigen::Index bit = Eigen::Index{1} << j;
        if ((s & bit) == 0) {
          raise_(s | bit, s) += drive_scale_[static_cast<std::size_t>(j)];
          raise_uniform(s | bit, s) += 1.0;
        }
      }
    }
    static_part_ = diagonal_.cast<Complex>().asDiagonal();
    static_part_ += lambda_ * raise_uniform * raise_uniform.adjoint();
  }
}

Complex FullSpaceHamiltonian::raise_factor(double t) const {
  const double arg = detuning_ * (t - segment_start_) - theta_ + (lab_ ? omega0_ * t : 0.0);
  return std::polar(1.0, -arg);
}

void FullSpaceHamiltonian::apply_coupling(const StateVector& psi, StateVector& out) const {
  // lambda S+ (S- psi)
  scratch_.setZero();
  const Eigen::Index dim = dimension();
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (psi(s) == Complex(0.0)) continue;
    for (int j = 0; j < n_qubits_; ++j) {
      const Eigen::Index bit = Eigen::Index{1} << j;
      if (s & bit) scratch_(s ^ bit) += psi(s);
    }
  }
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (scratch_(s) == Complex(0.0)) continue;
    for (int j = 0; j < n_qubits_; ++j) {
      const Eigen::Index bit = Eigen::Index{1} << j;
      if ((s & bit) == 0) out(s | bit) += lambda_ * scratch_(s);
    }
  }
}

void FullSpaceHamiltonian::apply_drive(Complex up, const StateVector& psi, StateVector& out) const {
  const Complex down = std::conj(up);
  const Eigen::Index dim = dimension();
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Complex amp = psi(s);
    if (amp == Complex(0.0)) continue;
    for (int j = 0; j < n_qubits_; ++j) {
      const Eigen::Index bit = Eigen::Index{1} << j;
      const double scale = amplitude_ * drive_scale_[static_cast<std::size_t>(j)];
      if (s & bit) {
        out(s ^ bit) += scale * down * amp;
      } else {
        out(s | bit) += scale * up * amp;
      }
    }
  }
}

void FullSpaceHamiltonian::apply(double t, const StateVector& psi, StateVector& out) const {
  const Complex up = raise_factor(t);
  if (is_dense()) {
    out.noalias() = static_part_ * psi;
    out.noalias() += (amplitude_ * up) * (raise_ * psi);
    out.noalias() += (amplitude_ * std::conj(up)) * (raise_.adjoint() * psi);
    return;
  }
  out = diagonal_.cast<Complex>().cwiseProduct(psi);
  apply_coupling(psi, out);
  apply_drive(up, psi, out);
}

void FullSpaceHamiltonian::operator()(double t, const StateVector& psi, StateVector& dpsi) const {
  apply(t, psi, dpsi);
  dpsi *= -kI;
}

Operator FullSpaceHamiltonian::matrix(double t) const {
  const Eigen::Index dim = dimension();
  Operator out(dim, dim);
  StateVector unit = StateVector::Zero(dim);
  StateVector col(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    unit(s) = 1.0;
    apply(t, unit, col);
    out.col(s) = col;
    unit(s) = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

FullSpaceRun integrate_full(const PulseSchedule& schedule, const DickeVector& initial, const IntegratorConfig& config,
                            DriveFrame frame, std::vector<double> drive_scale, int oracle_bound) {
  const int n = initial.n_qubits();
  require_capacity(n, oracle_bound, "integrate_full");
  if (schedule.n_qubits() != n) throw DimensionMismatch("integrate_full: schedule and state disagree on N");

  FullState state = FullState::from_dicke(initial);
  StateVector psi = state.amplitudes();
  const double norm0 = psi.squaredNorm();
  FullSpaceRun run{state, {}, {}, 0.0, {}};
  auto observe = [&](double t, const StateVector& current) {
    const FullState snapshot(n, current);
    run.projected.push_back({t, snapshot.project_to_dicke().amplitudes()});
    run.asymmetric_population.push_back(snapshot.asymmetric_population());
    run.norm_drift = std::max(run.norm_drift, std::abs(current.squaredNorm() - norm0));
  };
  observe(0.0, psi);

  double start = 0.0;
  double h = 0.0;
  for (const auto& seg : schedule.segments) {
    if (seg.duration > 0.0) {
      const FullSpaceHamiltonian ham(n, schedule.params, seg, start, frame, drive_scale, oracle_bound);
      propagate_segment(ham, psi, start, start + seg.duration, config,
                        default_max_step(n, schedule.params, seg, frame), h, run.stats, observe);
    }
    start += seg.duration;
  }
  run.final_state = FullState(n, std::move(psi));
  return run;
}

SymmetryReport verify_symmetry_invariance(const PulseSchedule& schedule, const IntegratorConfig& config,
                                          const DickeVector& initial, std::vector<double> drive_scale) {
  const auto run = integrate_full(schedule, initial, config, DriveFrame::Rotating, std::move(drive_scale));
  SymmetryReport report;
  for (double p : run.asymmetric_population) report.max_asymmetric_population = std::max(report.max_asymmetric_population, p);
  report.norm_drift = run.norm_drift;
  return report;
}

ReductionReport reduction_equivalence(const PulseSchedule& schedule, const IntegratorConfig& config,
                                      const DickeVector& initial) {
  require_capacity(initial.n_qubits(), kReductionQubitBound, "reduction_equivalence");
  const auto full = integrate_full(schedule, initial, config);
  const auto ladder = integrate(schedule, initial, config);
  if (full.projected.size() != ladder.trajectory.size()) {
    throw Error("reduction_equivalence: trajectories were sampled differently");
  }
  ReductionReport report;
  for (std::size_t i = 0; i < full.projected.size(); ++i) {
    const auto& a = full.projected[i].amplitudes;
    const auto& b = ladder.trajectory[i].amplitudes;
    report.max_amplitude_deviation = std::max(report.max_amplitude_deviation, (a - b).cwiseAbs().maxCoeff());
    report.max_population_deviation =
        std::max(report.max_population_deviation, (a.cwiseAbs2() - b.cwiseAbs2()).cwiseAbs().maxCoeff());
    report.max_asymmetric_population = std::max(report.max_asymmetric_population, full.asymmetric_population[i]);
  }
  const auto target = schedule.target.as_dicke_vector();
  report.fidelity_full = fidelity(target, full.final_state.project_to_dicke());
  report.fidelity_ladder = fidelity(target, ladder.final_state);
  report.norm_drift = std::max(full.norm_drift, ladder.norm_drift);
  return report;
}

}  // namespace dicke
