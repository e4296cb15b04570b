// Hamiltonians and dissipation channels of the two-atom blockade system,
// parameterized by a single physical spec. All frequencies are angular
// (a quoted "2pi x 2.5 MHz" is stored as 2*pi*2.5e6) and hbar = 1, so the
// drive term enters as omega |r><0| + h.c. and a pi-pulse on one
// transition takes t = pi/(2 omega).
#pragma once

#include <utility>
#include <vector>

#include "rydsim/qcore.hpp"

namespace rydsim::model {

struct SystemSpec {
  double omega_0r = 0.0;  // Rabi coupling |0> <-> |r|, rad/s
  double omega_1r = 0.0;  // Rabi coupling |1> <-> |r|, rad/s
  double delta_r = 0.0;   // blockade shift of |rr>, rad/s (any sign)
  double gamma_0r = 0.0;  // spontaneous emission |r> -> |0>, 1/s
  double gamma_1r = 0.0;  // spontaneous emission |r> -> |1>, 1/s

  // omega_0r = omega_1r and gamma_0r = gamma_1r, the simplification used
  // throughout the protocol.
  static SystemSpec uniform(double omega, double delta_r, double gamma);

  void validate() const;
};

// Far-detuned two-photon excitation via the intermediate 5p_1/2 state.
struct IntermediateStateSpec {
  double gamma_p = 0.0;      // intermediate-state decay rate, 1/s
  double delta_p = 0.0;      // single-photon detuning from 5p_1/2, rad/s
  double omega_laser = 0.0;  // per-beam coupling strength, rad/s

  void validate() const;
};

// Collapse operator with its rate, feeding the Lindblad dissipator
// d rho = rate * (S rho S^dag - 1/2 {S^dag S, rho}).
struct JumpChannel {
  qcore::LinearOperator op;
  double rate = 0.0;
};

enum class DecayTarget { to_g0, to_g1 };

// Two-atom EPR-preparation Hamiltonian:
//   H = sum_j omega_0r (|r>_j<0| + h.c.) + delta_r |rr><rr|.
qcore::LinearOperator h_epr(const SystemSpec& spec);

// Dispersive-regime effective Hamiltonian,
//   sqrt(2) omega_0r (|EPR><00| + h.c.)  with |EPR> = (|0r>+|r0>)/sqrt(2).
// Valid for delta_r >> omega_0r; the regime is the caller's responsibility.
qcore::LinearOperator h_epr_effective(const SystemSpec& spec);

// Disentangling-gate Hamiltonian: both drives on atom 1 (register index 0)
// only, blockade on |rr>:
//   H = omega_0r |r>_1<0| + omega_1r |r>_1<1| + h.c. + delta_r |rr><rr|.
qcore::LinearOperator h_gate(const SystemSpec& spec);

// One channel per (atom, target): operator |k><r| embedded at the atom,
// rate gamma_kr taken verbatim from the spec.
std::vector<JumpChannel> decay_channels(const SystemSpec& spec, int n_atoms,
                                        const std::vector<int>& atoms,
                                        const std::vector<DecayTarget>& targets);

// Photon-scattering rate of one excitation beam off the intermediate state,
//   gamma_sc = gamma_p * (omega_laser / delta_p)^2.
double scattering_rate(const IntermediateStateSpec& ispec);

// Intermediate-state scattering during a two-photon drive of |k> <-> |r>.
// Each driven (atom, ground state k) pair gets a dephasing channel |k><k|
// and a decay channel |k><r|, each at rate 2*gamma_sc: the transition uses
// two beams and both dressed components scatter, and every scattering
// event is treated as projective. Doubling delta_p quarters all rates.
std::vector<JumpChannel> scattering_channels(
    const IntermediateStateSpec& ispec, int n_atoms,
    const std::vector<std::pair<int, qcore::LevelLabel>>& driven);

}  // namespace rydsim::model
