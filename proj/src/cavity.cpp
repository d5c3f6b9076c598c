#include "dicke/cavity.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dicke {

namespace {

constexpr Complex kI(0.0, 1.0);

Operator annihilation(int n_max) {
  Operator a = Operator::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

AtomCavityState::AtomCavityState(int n_qubits, int n_max, StateVector amplitudes)
    : n_qubits_(n_qubits), n_max_(n_max), amplitudes_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_max < 1) throw DomainError("AtomCavityState: need N >= 1 and n_max >= 1");
  if (amplitudes_.size() != static_cast<Eigen::Index>(n_qubits + 1) * (n_max + 1)) {
    throw DimensionMismatch("AtomCavityState: expected (N+1)(n_max+1) amplitudes");
  }
}

AtomCavityState AtomCavityState::with_vacuum(const DickeVector& atoms, int n_max) {
  StateVector amps = StateVector::Zero(static_cast<Eigen::Index>(atoms.dimension()) * (n_max + 1));
  for (int k = 0; k < atoms.dimension(); ++k) amps(k * (n_max + 1)) = atoms[k];
  return AtomCavityState(atoms.n_qubits(), n_max, std::move(amps));
}

double AtomCavityState::fock_population(int n) const {
  double pop = 0.0;
  for (int k = 0; k <= n_qubits_; ++k) pop += std::norm(amplitude(k, n));
  return pop;
}

double AtomCavityState::photon_number() const {
  double mean = 0.0;
  for (int n = 1; n <= n_max_; ++n) mean += n * fock_population(n);
  return mean;
}

double AtomCavityState::photon_population() const {
  double pop = 0.0;
  for (int n = 1; n <= n_max_; ++n) pop += fock_population(n);
  return pop;
}

Operator AtomCavityState::reduced_atomic_state() const {
  const auto m = amplitudes_.reshaped<Eigen::RowMajor>(n_qubits_ + 1, n_max_ + 1);
  return m * m.adjoint();
}

double AtomCavityState::excitation_number() const {
  double total = 0.0;
  for (int k = 0; k <= n_qubits_; ++k) {
    for (int n = 0; n <= n_max_; ++n) total += (k - 0.5 * n_qubits_ + n) * std::norm(amplitude(k, n));
  }
  return total;
}

// ---------------------------------------------------------------------------

DispersiveParams dispersive_params(const PhysicalParams& params, double mean_photons) {
  DispersiveParams out;
  out.lambda_c = params.lambda_cavity();
  out.validity_ratio = params.g * std::sqrt(mean_photons + 1.0) / params.delta_c;
  if (out.validity_ratio > kDispersiveWarningRatio) {
    std::ostringstream os;
    os << "g sqrt(n+1)/delta_c = " << out.validity_ratio << " exceeds " << kDispersiveWarningRatio
       << "; the dispersive picture is questionable";
    out.warnings.push_back(os.str());
  }
  return out;
}

TavisCummingsModel::TavisCummingsModel(int n_qubits, const PhysicalParams& params, int n_max, DriveFrame frame)
    : n_qubits_(n_qubits), n_max_(n_max), omega0_(params.omega0), frame_(frame) {
  if (n_max < 2) throw DomainError("TavisCummingsModel: n_max must be at least 2");
  const auto ops = collective_matrices(n_qubits);
  const Operator a = annihilation(n_max);
  const Operator photons = a.adjoint() * a;
  const Operator id_atoms = Operator::Identity(n_qubits + 1, n_qubits + 1);
  const Operator id_field = Operator::Identity(n_max + 1, n_max + 1);

  atom_raise_ = kron(ops.raise, id_field);
  const Operator field_a = kron(id_atoms, a);
  const Operator exchange = params.g * (field_a.adjoint() * atom_raise_.adjoint() + field_a * atom_raise_);
  if (frame == DriveFrame::Lab) {
    static_operator_ = params.omega0 * kron(ops.sz, id_field) + params.omega_c() * kron(id_atoms, photons) + exchange;
  } else {
    static_operator_ = -params.delta_c * kron(id_atoms, photons) + exchange;
  }
  const double n = n_qubits;
  fastest_rate_ = std::abs(params.delta_c) * n_max + std::abs(params.g) * std::sqrt((n / 2 + 1) * (n / 2 + 1) * n_max);
  if (frame == DriveFrame::Lab) fastest_rate_ += std::abs(params.omega0) * (n / 2 + n_max + 1);
}

Complex TavisCummingsModel::raise_factor(double t, double detuning, double theta, double segment_start) const {
  const double arg = detuning * (t - segment_start) - theta + (frame_ == DriveFrame::Lab ? omega0_ * t : 0.0);
  return std::polar(1.0, -arg);
}

Operator TavisCummingsModel::hamiltonian(double t, const PulseSegment& segment, double segment_start) const {
  const Complex up = raise_factor(t, segment.frequency - omega0_, segment.phase, segment_start);
  return static_operator_ + segment.amplitude * (up * atom_raise_ + std::conj(up) * atom_raise_.adjoint());
}

Operator TavisCummingsModel::excitation_operator() const {
  const auto ops = collective_matrices(n_qubits_);
  const Operator a = annihilation(n_max_);
  return kron(ops.sz, Operator::Identity(n_max_ + 1, n_max_ + 1)) +
         kron(Operator::Identity(n_qubits_ + 1, n_qubits_ + 1), a.adjoint() * a);
}

Operator TavisCummingsModel::photon_number_operator() const {
  const Operator a = annihilation(n_max_);
  return kron(Operator::Identity(n_qubits_ + 1, n_qubits_ + 1), a.adjoint() * a);
}

double TavisCummingsModel::default_max_step(const PulseSegment& segment) const {
  const double rate = fastest_rate_ + 2.0 * std::abs(segment.amplitude) * (n_qubits_ / 2.0 + 1) +
                      std::abs(segment.frequency - omega0_);
  return 2.0 * std::numbers::pi / rate / 20.0;
}

TavisCummingsModel::Generator::Generator(const TavisCummingsModel& model, const PulseSegment& segment,
                                         double segment_start)
    : model_(&model),
      amplitude_(segment.amplitude),
      detuning_(segment.frequency - model.omega0_),
      theta_(segment.phase),
      segment_start_(segment_start) {}

void TavisCummingsModel::Generator::operator()(double t, const StateVector& psi, StateVector& dpsi) const {
  const Complex up = model_->raise_factor(t, detuning_, theta_, segment_start_);
  dpsi.noalias() = model_->static_operator_ * psi;
  dpsi.noalias() += (amplitude_ * up) * (model_->atom_raise_ * psi);
  dpsi.noalias() += (amplitude_ * std::conj(up)) * (model_->atom_raise_.adjoint() * psi);
  dpsi *= -kI;
}

// ---------------------------------------------------------------------------

Operator effective_model(int n_qubits, const PhysicalParams& params) {
  return coupling_hamiltonian(n_qubits, params.lambda_cavity());
}

Operator effective_model_with_cavity(int n_qubits, const PhysicalParams& params, int n_max) {
  const auto ops = collective_matrices(n_qubits);
  const Operator a = annihilation(n_max);
  const Operator id_field = Operator::Identity(n_max + 1, n_max + 1);
  return params.lambda_cavity() * (kron(2.0 * ops.sz, a.adjoint() * a) + kron(ops.raise * ops.lower, id_field));
}

AtomCavityState integrate_cavity(const TavisCummingsModel& model, const PulseSchedule& schedule,
                                 const AtomCavityState& initial, const IntegratorConfig& config,
                                 const std::function<void(double, const AtomCavityState&)>& observe) {
  if (initial.n_qubits() != model.n_qubits() || initial.n_max() != model.n_max()) {
    throw DimensionMismatch("integrate_cavity: state does not match the model");
  }
  StateVector psi = initial.amplitudes();
  StepStats stats;
  auto sample = [&](double t, const StateVector& current) {
    if (observe) observe(t, AtomCavityState(model.n_qubits(), model.n_max(), current));
  };
  sample(0.0, psi);
  double start = 0.0;
  double h = 0.0;
  for (const auto& seg : schedule.segments) {
    if (seg.duration > 0.0) {
      const TavisCummingsModel::Generator gen(model, seg, start);
      propagate_segment(gen, psi, start, start + seg.duration, config, model.default_max_step(seg), h, stats, sample);
    }
    start += seg.duration;
  }
  return AtomCavityState(model.n_qubits(), model.n_max(), std::move(psi));
}

CavityComparison compare_models(const PulseSchedule& schedule, const PhysicalParams& params,
                                const IntegratorConfig& config) {
  const int n = schedule.n_qubits();
  const auto dispersive = dispersive_params(params);
  const double lambda_c = dispersive.lambda_c;
  if (std::abs(schedule.params.lambda - lambda_c) > 1e-9 * std::max(std::abs(lambda_c), 1e-300)) {
    std::ostringstream os;
    os << "compare_models: schedule was compiled with lambda=" << schedule.params.lambda
       << " but the cavity gives lambda_c=" << lambda_c;
    throw DomainError(os.str());
  }

  PulseSchedule effective_schedule = schedule;
  effective_schedule.params.lambda = lambda_c;
  effective_schedule.params.omega0 = params.omega0;
  const auto effective = integrate(effective_schedule, DickeVector::ground(n), config, DriveFrame::Rotating);

  CavityComparison report;
  report.lambda_c = lambda_c;
  report.validity_ratio = dispersive.validity_ratio;
  report.warnings = dispersive.warnings;
  report.norm_drift = effective.norm_drift;

  for (int n_max = std::max(params.n_max, 2);; n_max += 2) {
    const TavisCummingsModel model(n, params, n_max, DriveFrame::Rotating);
    std::vector<CavitySample> samples;
    samples.reserve(effective.trajectory.size());
    double max_photons = 0.0;
    double max_tail = 0.0;
    double drift = 0.0;
    auto observe = [&](double t, const AtomCavityState& state) {
      const auto& eff = effective.trajectory.at(samples.size()).amplitudes;
      const Operator rho = state.reduced_atomic_state();
      CavitySample s;
      s.time = t;
      s.effective = eff;
      s.atomic_populations = rho.diagonal().real();
      s.fock_populations.resize(n_max + 1);
      for (int f = 0; f <= n_max; ++f) s.fock_populations(f) = state.fock_population(f);
      s.fidelity = std::clamp(eff.dot(rho * eff).real(), 0.0, 1.0);
      max_photons = std::max(max_photons, state.photon_population());
      max_tail = std::max(max_tail, state.tail_population());
      drift = std::max(drift, std::abs(state.amplitudes().squaredNorm() - 1.0));
      samples.push_back(std::move(s));
    };
    integrate_cavity(model, schedule, AtomCavityState::with_vacuum(DickeVector::ground(n), n_max), config, observe);

    report.n_max_used = n_max;
    report.max_photon_population = max_photons;
    report.max_tail_population = max_tail;
    report.norm_drift = std::max(report.norm_drift, drift);
    report.trajectory = std::move(samples);
    report.truncation_ok = max_tail <= kFockTailTolerance;
    if (report.truncation_ok || n_max + 2 > kMaxFockTruncation) break;
  }
  if (!report.truncation_ok) {
    report.warnings.push_back("Fock truncation insufficient even at n_max=" + std::to_string(report.n_max_used));
  }
  report.min_fidelity = 1.0;
  for (const auto& s : report.trajectory) report.min_fidelity = std::min(report.min_fidelity, s.fidelity);
  report.fidelity_full_vs_effective = report.trajectory.back().fidelity;
  return report;
}

void write_cavity_csv(std::ostream& out, const std::vector<CavitySample>& trajectory) {
  if (trajectory.empty()) return;
  const auto dim = trajectory.front().effective.size();
  const auto fock = trajectory.front().fock_populations.size();
  out << "time_s";
  for (Eigen::Index k = 0; k < dim; ++k) out << ",pop_" << k;
  for (Eigen::Index k = 0; k < dim; ++k) out << ",re_" << k << ",im_" << k;
  for (Eigen::Index k = 0; k < dim; ++k) out << ",full_pop_" << k;
  for (Eigen::Index n = 0; n < fock; ++n) out << ",photon_" << n;
  out << ",fidelity\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : trajectory) {
    out << s.time;
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << std::norm(s.effective(k));
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << s.effective(k).real() << ',' << s.effective(k).imag();
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << s.atomic_populations(k);
    for (Eigen::Index n = 0; n < fock; ++n) out << ',' << s.fock_populations(n);
    out << ',' << s.fidelity << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dicke
