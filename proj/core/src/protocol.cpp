#include "rydsim/protocol.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rydsim::protocol {

using model::DecayTarget;
using model::JumpChannel;
using model::SystemSpec;
using qcore::Complex;
using qcore::DensityOperator;
using qcore::LevelLabel;
using qcore::LinearOperator;
using qcore::Matrix;
using qcore::PureState;
using qcore::Vector;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

PureState epr_state() {
  Vector v = Vector::Zero(9);
  v(qcore::basis_index({LevelLabel::g0, LevelLabel::ryd}, 3)) = 1.0 / kSqrt2;
  v(qcore::basis_index({LevelLabel::ryd, LevelLabel::g0}, 3)) = 1.0 / kSqrt2;
  return PureState(2, 3, std::move(v));
}

void require_uniform(const SystemSpec& spec, const char* where) {
  if (spec.omega_0r != spec.omega_1r || spec.gamma_0r != spec.gamma_1r) {
    throw std::invalid_argument(std::string(where) +
                                ": requires omega_0r == omega_1r and gamma_0r == gamma_1r");
  }
}

// Stage specs derived from the protocol-level (Omega, delta_r, gamma).
SystemSpec epr_stage_spec(const SystemSpec& spec) {
  SystemSpec s = spec;
  s.gamma_1r = 0.0;  // EPR stage models the single channel |0><r| at full gamma
  return s;
}

SystemSpec gate_stage_spec(const SystemSpec& spec) {
  SystemSpec s;
  s.omega_0r = s.omega_1r = 0.5 * spec.omega_0r;
  s.delta_r = spec.delta_r;
  s.gamma_0r = s.gamma_1r = 0.5 * spec.gamma_0r;
  return s;
}

// single-atom operators on the 3-level atom
Matrix pauli_matrix(Recovery r) {
  Matrix m = Matrix::Zero(3, 3);
  switch (r) {
    case Recovery::identity:
      m = Matrix::Identity(3, 3);
      break;
    case Recovery::sigma_x:  // on {|0>,|r>}, identity on |1>
      m(0, 2) = m(2, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case Recovery::sigma_y:
      m(0, 2) = Complex(0.0, -1.0);
      m(2, 0) = Complex(0.0, 1.0);
      m(1, 1) = 1.0;
      break;
    case Recovery::sigma_z:
      m = Matrix::Identity(3, 3);
      m(2, 2) = -1.0;
      break;
  }
  return m;
}

// |r> <-> |1> mapping pulse
Matrix remap_matrix() {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

// decay (and optional scattering on the listed driven pairs) with no drive,
// for the pulse-dwell segments of the lindblad pipeline
DensityOperator decoherence_dwell(const DensityOperator& rho, const SystemSpec& spec,
                                  double duration,
                                  const std::optional<model::IntermediateStateSpec>& scattering,
                                  const std::vector<std::pair<int, LevelLabel>>& driven) {
  int n = rho.n_atoms();
  std::vector<int> atoms(n);
  for (int a = 0; a < n; ++a) atoms[a] = a;
  SystemSpec split = spec;
  split.gamma_0r = split.gamma_1r = 0.5 * spec.gamma_0r;
  std::vector<JumpChannel> channels =
      model::decay_channels(split, n, atoms, {DecayTarget::to_g0, DecayTarget::to_g1});
  if (scattering) {
    auto extra = model::scattering_channels(*scattering, n, driven);
    channels.insert(channels.end(), extra.begin(), extra.end());
  }
  LinearOperator zero(n, 3, Matrix::Zero(rho.dim(), rho.dim()), true);
  auto res = dynamics::propagate_lindblad(zero, channels, rho, {duration});
  return res.states.back();
}

int idx2(LevelLabel a, LevelLabel b) { return qcore::basis_index({a, b}, 3); }

}  // namespace

InputQubitSpec::InputQubitSpec(Complex a, Complex b) : alpha(a), beta(b) {
  double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > 1e-12) {
    throw std::invalid_argument("InputQubitSpec: |alpha|^2 + |beta|^2 must equal 1 to 1e-12");
  }
}

PureState InputQubitSpec::state() const {
  Vector v = Vector::Zero(3);
  v(0) = alpha;
  v(1) = beta;
  return PureState(1, 3, std::move(v));
}

PulseTimings PulseTimings::for_omega(double omega) {
  if (omega <= 0) throw std::invalid_argument("PulseTimings: omega must be positive");
  PulseTimings t;
  t.t1 = M_PI / (2.0 * kSqrt2 * omega);
  t.t2 = kSqrt2 * M_PI / omega + M_PI / (4.0 * omega);
  t.t3 = M_PI / omega;
  return t;
}

PrepResult prepare_epr(const SystemSpec& spec, Mode mode,
                       const std::optional<model::IntermediateStateSpec>& scattering) {
  require_uniform(spec, "prepare_epr");
  double omega = spec.omega_0r;
  PulseTimings timings = PulseTimings::for_omega(omega);

  if (mode == Mode::ideal) {
    return {DensityOperator::from_pure(epr_state()), timings.t1, 1.0};
  }

  SystemSpec stage = epr_stage_spec(spec);
  std::vector<JumpChannel> channels;
  if (mode == Mode::lindblad) {
    channels = model::decay_channels(stage, 2, {0, 1}, {DecayTarget::to_g0});
    if (scattering) {
      auto extra = model::scattering_channels(
          *scattering, 2, {{0, LevelLabel::g0}, {1, LevelLabel::g0}});
      channels.insert(channels.end(), extra.begin(), extra.end());
    }
  }

  DensityOperator rho0 =
      DensityOperator::from_pure(PureState::basis(3, {LevelLabel::g0, LevelLabel::g0}));
  double t_max = 2.0 / omega;  // generously covers the first oscillation
  auto peak = dynamics::propagate_to_first_peak(model::h_epr(stage), channels, rho0, epr_state(),
                                                t_max);
  return {peak.state, peak.t_peak, peak.population};
}

qcore::PureState bell_state(BellLabel label) {
  Vector v = Vector::Zero(9);
  switch (label) {
    case BellLabel::phi_plus:
      v(idx2(LevelLabel::g0, LevelLabel::g0)) = 1.0 / kSqrt2;
      v(idx2(LevelLabel::g1, LevelLabel::ryd)) = 1.0 / kSqrt2;
      break;
    case BellLabel::phi_minus:
      v(idx2(LevelLabel::g0, LevelLabel::g0)) = 1.0 / kSqrt2;
      v(idx2(LevelLabel::g1, LevelLabel::ryd)) = -1.0 / kSqrt2;
      break;
    case BellLabel::psi_plus:
      v(idx2(LevelLabel::g0, LevelLabel::ryd)) = 1.0 / kSqrt2;
      v(idx2(LevelLabel::g1, LevelLabel::g0)) = 1.0 / kSqrt2;
      break;
    case BellLabel::psi_minus:
      v(idx2(LevelLabel::g0, LevelLabel::ryd)) = 1.0 / kSqrt2;
      v(idx2(LevelLabel::g1, LevelLabel::g0)) = -1.0 / kSqrt2;
      break;
  }
  return PureState(2, 3, std::move(v));
}

std::array<BellTerm, 4> bell_decompose(const qcore::PureState& psi) {
  if (psi.n_atoms() != 3 || psi.levels_per_atom() != 3) {
    throw std::invalid_argument("bell_decompose: expects a 3-atom, 3-level state");
  }
  // support check: atom 1 in {g0,g1}, atom 2 in {g0,ryd}
  double outside = 0.0;
  for (int i = 0; i < psi.dim(); ++i) {
    int a1 = i / 9, a2 = (i / 3) % 3;
    if (a1 == 2 || a2 == 1) outside += std::norm(psi.amplitudes()(i));
  }
  if (outside > 1e-9) {
    throw std::invalid_argument("bell_decompose: support outside the Bell subspace");
  }

  std::array<BellTerm, 4> out = {
      BellTerm{BellLabel::phi_plus, PureState(1, 3, Vector::Zero(3))},
      BellTerm{BellLabel::phi_minus, PureState(1, 3, Vector::Zero(3))},
      BellTerm{BellLabel::psi_plus, PureState(1, 3, Vector::Zero(3))},
      BellTerm{BellLabel::psi_minus, PureState(1, 3, Vector::Zero(3))},
  };
  for (auto& term : out) {
    const Vector bell = bell_state(term.label).amplitudes();
    Vector coeff = Vector::Zero(3);
    for (int i12 = 0; i12 < 9; ++i12) {
      if (bell(i12) == Complex(0.0, 0.0)) continue;
      for (int i3 = 0; i3 < 3; ++i3) {
        coeff(i3) += std::conj(bell(i12)) * psi.amplitudes()(i12 * 3 + i3);
      }
    }
    term.coefficient_state = PureState(1, 3, std::move(coeff));
  }
  return out;
}

qcore::LinearOperator ideal_cnot_operator() {
  Matrix m = Matrix::Identity(9, 9);
  int i0r = idx2(LevelLabel::g0, LevelLabel::ryd);
  int i1r = idx2(LevelLabel::g1, LevelLabel::ryd);
  int i00 = idx2(LevelLabel::g0, LevelLabel::g0);
  int i10 = idx2(LevelLabel::g1, LevelLabel::g0);
  m(i0r, i0r) = -1.0;
  m(i1r, i1r) = -1.0;
  m(i00, i00) = m(i10, i10) = 0.0;
  m(i10, i00) = m(i00, i10) = 1.0;
  return LinearOperator(2, 3, std::move(m), false);
}

double gate_pulse_time(const SystemSpec& gate_spec) {
  if (gate_spec.omega_0r <= 0) throw std::invalid_argument("gate_pulse_time: omega must be positive");
  // Raman-transfer time of h_gate; equals sqrt(2) pi / omega_01 with
  // omega_01 = 2 * omega_0r.
  return M_PI / (kSqrt2 * gate_spec.omega_0r);
}

qcore::PureState cnot_like_gate_ideal(const qcore::PureState& state12) {
  return ideal_cnot_operator().apply(state12);
}

qcore::DensityOperator cnot_like_gate(
    const qcore::DensityOperator& state12, const SystemSpec& gate_spec, Mode mode,
    const std::optional<model::IntermediateStateSpec>& scattering) {
  if (state12.n_atoms() != 2) throw std::invalid_argument("cnot_like_gate: expects 2 atoms");
  require_uniform(gate_spec, "cnot_like_gate");
  if (mode == Mode::ideal) {
    Matrix m = ideal_cnot_operator().matrix();
    return DensityOperator(2, 3, m * state12.matrix() * m.adjoint());
  }
  double t_gate = gate_pulse_time(gate_spec);
  std::vector<JumpChannel> channels;
  if (mode == Mode::lindblad) {
    channels = model::decay_channels(gate_spec, 2, {0, 1},
                                     {DecayTarget::to_g0, DecayTarget::to_g1});
    if (scattering) {
      auto extra = model::scattering_channels(
          *scattering, 2, {{0, LevelLabel::g0}, {0, LevelLabel::g1}});
      channels.insert(channels.end(), extra.begin(), extra.end());
    }
  }
  auto res = dynamics::propagate_lindblad(model::h_gate(gate_spec), channels, state12, {t_gate});
  return res.states.back();
}

qcore::LinearOperator half_pi_unitary() {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = m(0, 2) = m(2, 0) = 1.0 / kSqrt2;
  m(2, 2) = -1.0 / kSqrt2;
  m(1, 1) = 1.0;
  return LinearOperator(1, 3, std::move(m), true);
}

qcore::PureState half_pi_pulse_q2(const qcore::PureState& state) {
  int q2 = state.n_atoms() == 3 ? 1 : (state.n_atoms() == 2 ? 1 : 0);
  return qcore::embed_single_atom(half_pi_unitary(), q2, state.n_atoms()).apply(state);
}

qcore::DensityOperator half_pi_pulse_q2(const qcore::DensityOperator& state) {
  int q2 = state.n_atoms() == 3 ? 1 : (state.n_atoms() == 2 ? 1 : 0);
  return qcore::embed_single_atom(half_pi_unitary(), q2, state.n_atoms()).conjugate(state);
}

MeasurementResult measure_bell(const qcore::DensityOperator& state123) {
  if (state123.n_atoms() != 3) throw std::invalid_argument("measure_bell: expects 3 atoms");
  struct Case {
    LevelLabel q1, q2;
    Recovery rec;
  };
  // recovery table: |1r> -> sigma_x, |10> -> sigma_y, |0r> -> I, |00> -> sigma_z
  const std::array<Case, 4> cases = {
      Case{LevelLabel::g1, LevelLabel::ryd, Recovery::sigma_x},
      Case{LevelLabel::g1, LevelLabel::g0, Recovery::sigma_y},
      Case{LevelLabel::g0, LevelLabel::ryd, Recovery::identity},
      Case{LevelLabel::g0, LevelLabel::g0, Recovery::sigma_z},
  };

  // placeholder post-states for zero-probability branches
  const BranchOutcome empty{LevelLabel::g0, LevelLabel::g0, 0.0,
                            DensityOperator(1, 3, Matrix::Identity(3, 3) / 3.0),
                            Recovery::identity, 0.0};
  MeasurementResult out{{empty, empty, empty, empty}, 0.0};

  double p_total = 0.0;
  for (size_t b = 0; b < cases.size(); ++b) {
    const auto& c = cases[b];
    Matrix p1 = qcore::embed_single_atom(
                    LinearOperator::single_atom_projector(3, c.q1, c.q1), 0, 3).matrix();
    Matrix p2 = qcore::embed_single_atom(
                    LinearOperator::single_atom_projector(3, c.q2, c.q2), 1, 3).matrix();
    Matrix projector = p1 * p2;
    Matrix sub = projector * state123.matrix() * projector;
    double p = sub.trace().real();
    p_total += p;

    BranchOutcome& branch = out.branches[b];
    branch.outcome_q1 = c.q1;
    branch.outcome_q2 = c.q2;
    branch.recovery = c.rec;
    branch.probability = p;
    if (p > 1e-14) {
      DensityOperator joint(3, 3, sub / p);
      branch.post_state_q3 = qcore::partial_trace(joint, {2});
    }
  }
  out.p_leak = 1.0 - p_total;
  if (std::abs(state123.trace() - 1.0) > 1e-6 || out.p_leak < -1e-6) {
    throw std::runtime_error("measure_bell: outcome probabilities deviate from total 1 beyond 1e-6");
  }
  return out;
}

const BranchOutcome& sample_branch(const MeasurementResult& result, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double total = 0.0;
  for (const auto& b : result.branches) total += b.probability;
  double u = uni(rng) * std::max(total, 1e-300);
  double acc = 0.0;
  for (const auto& b : result.branches) {
    acc += b.probability;
    if (u <= acc) return b;
  }
  return result.branches.back();
}

qcore::DensityOperator recover_q3(const BranchOutcome& branch, const SystemSpec& spec, Mode mode,
                                  double t3,
                                  const std::optional<model::IntermediateStateSpec>& scattering) {
  DensityOperator rho = branch.post_state_q3;
  if (mode == Mode::lindblad && t3 > 0.0) {
    rho = decoherence_dwell(rho, spec, t3, scattering,
                            {{0, LevelLabel::g0}, {0, LevelLabel::g1}});
  }
  Matrix u = remap_matrix() * pauli_matrix(branch.recovery);
  return DensityOperator(1, 3, u * rho.matrix() * u.adjoint());
}

TeleportReport teleport(const InputQubitSpec& input, const SystemSpec& spec, Mode mode,
                        const TeleportOptions& options) {
  require_uniform(spec, "teleport");
  double omega = spec.omega_0r;
  PulseTimings timings = PulseTimings::for_omega(omega);

  // stage 1: EPR pair on atoms 2,3
  PrepResult prep = prepare_epr(spec, mode, options.scattering);
  DensityOperator rho1 = DensityOperator::from_pure(input.state());
  Matrix rho123 = qcore::tensor(LinearOperator(1, 3, rho1.matrix(), true),
                                LinearOperator(2, 3, prep.state.matrix(), true))
                      .matrix();
  DensityOperator rho(3, 3, std::move(rho123));

  // stage 2: disentangling gate on atoms 1,2 then the pi/2 pulse on atom 2
  SystemSpec gate = gate_stage_spec(spec);
  if (mode == Mode::ideal) {
    Matrix u = qcore::tensor(ideal_cnot_operator(), LinearOperator::identity(1, 3)).matrix();
    rho = DensityOperator(3, 3, u * rho.matrix() * u.adjoint());
  } else {
    double t_gate = gate_pulse_time(gate);
    LinearOperator h = qcore::tensor(model::h_gate(gate), LinearOperator::identity(1, 3));
    if (mode == Mode::full_unitary) {
      Matrix u = dynamics::HermitianPropagator(h).matrix(t_gate);
      rho = DensityOperator(3, 3, u * rho.matrix() * u.adjoint());
    } else {
      auto channels = model::decay_channels(gate, 3, {0, 1, 2},
                                            {DecayTarget::to_g0, DecayTarget::to_g1});
      if (options.scattering) {
        auto extra = model::scattering_channels(
            *options.scattering, 3, {{0, LevelLabel::g0}, {0, LevelLabel::g1}});
        channels.insert(channels.end(), extra.begin(), extra.end());
      }
      rho = dynamics::propagate_lindblad(h, channels, rho, {t_gate}).states.back();
    }
  }
  if (mode == Mode::lindblad) {
    double t_half_pi = M_PI / (4.0 * omega);
    rho = decoherence_dwell(rho, spec, t_half_pi, options.scattering, {{1, LevelLabel::g0}});
  }
  rho = half_pi_pulse_q2(rho);

  // stage 3: measurement and conditional recovery
  MeasurementResult meas = measure_bell(rho);
  DensityOperator target = DensityOperator::from_pure(input.state());

  TeleportReport report{meas.branches, meas.p_leak, 0.0, timings, timings.total(),
                        prep.elapsed_time, prep.p_epr};
  for (auto& branch : report.branches) {
    if (branch.probability <= 1e-14) {
      branch.branch_fidelity = 0.0;
      continue;
    }
    DensityOperator recovered =
        recover_q3(branch, spec, mode, timings.t3, options.scattering);
    branch.branch_fidelity = qcore::fidelity(target, recovered);
    report.average_fidelity += branch.probability * branch.branch_fidelity;
  }
  return report;
}

std::array<InputQubitSpec, 6> axial_inputs() {
  const double s = 1.0 / kSqrt2;
  return {InputQubitSpec{1.0, 0.0},
          InputQubitSpec{0.0, 1.0},
          InputQubitSpec{s, s},
          InputQubitSpec{s, -s},
          InputQubitSpec{s, Complex(0.0, s)},
          InputQubitSpec{s, Complex(0.0, -s)}};
}

double teleport_axial_average(const SystemSpec& spec, Mode mode, const TeleportOptions& options) {
  double sum = 0.0;
  for (const auto& input : axial_inputs()) {
    sum += teleport(input, spec, mode, options).average_fidelity;
  }
  return sum / 6.0;
}

}  // namespace rydsim::protocol
