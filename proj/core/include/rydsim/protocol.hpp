// The teleportation pipeline: EPR preparation between atoms 2 and 3,
// Bell decomposition, the blockade-conditioned disentangling gate on
// atoms 1 and 2, a pi/2 pulse, projective measurement, and conditional
// recovery of the input state on atom 3.
//
// Conventions bridging the two stages: the protocol-level spec carries the
// common laser coupling Omega (omega_0r = omega_1r) and the total Rydberg
// decay rate gamma (gamma_0r = gamma_1r). Stage operators are derived as
//   EPR stage:  h_epr elements Omega, one decay channel |0><r| at gamma;
//   gate stage: h_gate elements Omega/2 (so the two-photon Raman transfer
//               completes at sqrt(2) pi / Omega) and decay channels to
//               both ground states at gamma/2 each.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>

#include "rydsim/dynamics.hpp"
#include "rydsim/model.hpp"
#include "rydsim/qcore.hpp"

namespace rydsim::protocol {

enum class Mode { ideal, full_unitary, lindblad };

// Unknown input state alpha|0> + beta|1> on atom 1.
struct InputQubitSpec {
  qcore::Complex alpha{1.0, 0.0};
  qcore::Complex beta{0.0, 0.0};

  InputQubitSpec(qcore::Complex a, qcore::Complex b);
  qcore::PureState state() const;
};

// Pulse schedule for common coupling Omega:
//   t1 = pi / (2 sqrt(2) Omega)   EPR preparation
//   t2 = sqrt(2) pi/Omega + pi/(4 Omega)   gate + pi/2 pulse
//   t3 = pi / Omega               recovery (branch average)
struct PulseTimings {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;

  static PulseTimings for_omega(double omega);
  double total() const { return t1 + t2 + t3; }
};

enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus };
enum class Recovery { sigma_x, sigma_y, identity, sigma_z };

// One Bell-measurement branch. post_state_q3 is the conditional atom-3
// state before recovery; branch_fidelity is filled once recovery has run.
struct BranchOutcome {
  qcore::LevelLabel outcome_q1;
  qcore::LevelLabel outcome_q2;
  double probability = 0.0;
  qcore::DensityOperator post_state_q3;
  Recovery recovery = Recovery::identity;
  double branch_fidelity = 0.0;
};

struct PrepResult {
  qcore::DensityOperator state;  // atoms 2,3
  double elapsed_time = 0.0;
  double p_epr = 0.0;
};

// EPR preparation from |00>. Ideal mode returns (|0r>+|r0>)/sqrt(2) after
// t1 exactly; full modes propagate h_epr and stop at the first local
// maximum of P_EPR (the later, higher peaks are not usable once
// spontaneous decay is present).
PrepResult prepare_epr(const model::SystemSpec& spec, Mode mode,
                       const std::optional<model::IntermediateStateSpec>& scattering = {});

// Expansion of a 3-atom pure state over the atom-1/2 Bell basis
//   Phi+- = (|00> +- |1r>)/sqrt(2),  Psi+- = (|0r> +- |10>)/sqrt(2),
// with unnormalized atom-3 coefficient states. The four terms resum to
// the input state exactly.
struct BellTerm {
  BellLabel label;
  qcore::PureState coefficient_state;  // single atom, unnormalized
};
std::array<BellTerm, 4> bell_decompose(const qcore::PureState& psi);

qcore::PureState bell_state(BellLabel label);

// The ideal disentangling transformation on {|0r>,|1r>,|00>,|10>}:
// blocked states pick up -1, |00> and |10> swap.
qcore::LinearOperator ideal_cnot_operator();

// Disentangling gate on a two-atom state. Ideal mode applies the matrix
// above; lindblad mode propagates h_gate plus decay channels for the
// Raman-transfer time pi/(sqrt(2) omega_0r) (= sqrt(2) pi / Omega with
// the stage convention omega_0r = Omega/2).
qcore::DensityOperator cnot_like_gate(
    const qcore::DensityOperator& state12, const model::SystemSpec& gate_spec, Mode mode,
    const std::optional<model::IntermediateStateSpec>& scattering = {});
qcore::PureState cnot_like_gate_ideal(const qcore::PureState& state12);
double gate_pulse_time(const model::SystemSpec& gate_spec);

// pi/2 pulse on atom 2 within {g0, ryd}: (|0>+|r>)/sqrt(2) -> |0> and
// (|0>-|r>)/sqrt(2) -> |r>.
qcore::LinearOperator half_pi_unitary();
qcore::PureState half_pi_pulse_q2(const qcore::PureState& state);
qcore::DensityOperator half_pi_pulse_q2(const qcore::DensityOperator& state);

// Projective measurement of atoms 1 (in {g0,g1}) and 2 (in {g0,ryd}) of a
// 3-atom state. Probabilities of the four branches plus the leakage
// probability outside the measured subspaces sum to 1 within 1e-6;
// leakage (residual Rydberg population on atom 1, decay into |1>_2) is
// reported, not redistributed.
struct MeasurementResult {
  std::array<BranchOutcome, 4> branches;
  double p_leak = 0.0;
};
MeasurementResult measure_bell(const qcore::DensityOperator& state123);

// Draw one branch from the Born distribution with a seeded generator;
// identical seeds give identical draws.
const BranchOutcome& sample_branch(const MeasurementResult& result, std::uint64_t seed);

// Conditional recovery on atom 3: the branch's Pauli on {g0, ryd}, then
// the |r> <-> |1> mapping pulse. In lindblad mode Rydberg decay (and
// scattering, when configured) acts during the effective duration t3
// before the recovery unitaries.
qcore::DensityOperator recover_q3(const BranchOutcome& branch, const model::SystemSpec& spec,
                                  Mode mode, double t3,
                                  const std::optional<model::IntermediateStateSpec>& scattering = {});

struct TeleportOptions {
  std::optional<model::IntermediateStateSpec> scattering;
  std::uint64_t seed = 0;
};

struct TeleportReport {
  std::array<BranchOutcome, 4> branches;
  double p_leak = 0.0;
  double average_fidelity = 0.0;  // sum_b p_b F_b; leakage counts as loss
  PulseTimings timings;
  double total_time = 0.0;
  double epr_elapsed = 0.0;
  double epr_population = 0.0;
};

// Full protocol for one input state. The spec carries (Omega, delta_r,
// gamma): omega_0r = omega_1r and gamma_0r = gamma_1r are required.
TeleportReport teleport(const InputQubitSpec& input, const model::SystemSpec& spec, Mode mode,
                        const TeleportOptions& options = {});

// The six axial input states |0>, |1>, (|0>+-|1>)/sqrt(2), (|0>+-i|1>)/sqrt(2).
std::array<InputQubitSpec, 6> axial_inputs();

// Fidelity additionally averaged over the six axial inputs.
double teleport_axial_average(const model::SystemSpec& spec, Mode mode,
                              const TeleportOptions& options = {});

}  // namespace rydsim::protocol
