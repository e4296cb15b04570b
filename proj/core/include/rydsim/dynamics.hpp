// Time evolution: exact unitary propagation via eigendecomposition,
// fixed-step RK4 integration of the Lindblad master equation
//   d rho/dt = -i [H, rho] + sum_c rate_c (S rho S^dag - 1/2 {S^dag S, rho}),
// and the closed-form solution of the driven blockaded pair.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rydsim/model.hpp"
#include "rydsim/qcore.hpp"

namespace rydsim::dynamics {

// Fixed-step RK4 step rule: dt = (2*pi/400) / max(omega_max, 1/t_total).
// The divisor keeps sampled states positive to the -1e-8 eigenvalue floor
// and the gamma=0 run within 1e-7 state fidelity of the exact propagator.
inline constexpr double kStepDivisor = 400.0;
double integration_step(double omega_max, double t_total);

// Largest angular scale of a Hamiltonian-plus-channels problem, used when
// the caller does not pass an explicit step.
double spectral_scale(const qcore::LinearOperator& h,
                      const std::vector<model::JumpChannel>& channels);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<qcore::DensityOperator> states;
};

// exp(-i H t) |psi0> through the eigendecomposition of Hermitian H; exact
// to machine precision and reusable across times.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const qcore::LinearOperator& h);

  qcore::PureState apply(const qcore::PureState& psi0, double t) const;
  qcore::Matrix matrix(double t) const;

 private:
  int n_atoms_;
  int levels_;
  Eigen::VectorXd eigenvalues_;
  qcore::Matrix eigenvectors_;
};

qcore::PureState propagate_unitary(const qcore::LinearOperator& h, const qcore::PureState& psi0,
                                   double t);

// Master-equation integration sampled at the requested times. t_grid must
// be increasing and start at >= 0. Trace drift is diagnosed, never
// renormalized; drift beyond tolerance aborts with a diagnostic.
EvolutionResult propagate_lindblad(const qcore::LinearOperator& h,
                                   const std::vector<model::JumpChannel>& channels,
                                   const qcore::DensityOperator& rho0,
                                   const std::vector<double>& t_grid, double dt_hint = 0.0);

// First local maximum of a sampled curve with parabolic refinement.
struct Peak {
  double t = 0.0;
  double value = 0.0;
  bool found = false;
};
Peak first_local_max(const std::vector<double>& ts, const std::vector<double>& ys);
std::vector<Peak> local_maxima(const std::vector<double>& ts, const std::vector<double>& ys);

// Evolve under the master equation while tracking <probe|rho|probe>, stop
// at the first local maximum of the tracked population, and return the
// state re-propagated to the refined peak time.
struct PeakStopResult {
  qcore::DensityOperator state;
  double t_peak = 0.0;
  double population = 0.0;
};
PeakStopResult propagate_to_first_peak(const qcore::LinearOperator& h,
                                       const std::vector<model::JumpChannel>& channels,
                                       const qcore::DensityOperator& rho0,
                                       const qcore::PureState& probe, double t_max,
                                       double dt_hint = 0.0);

// Closed-form evolution of the blockaded pair from |0>_1|r>_2 under the
// gate drive, written in terms of the two-photon Rabi frequency omega_01:
//
//   a_0r = 1/2 [1 + e^{-i dr t/2}(cos(w' t/2) + i (dr/w') sin(w' t/2))]
//   a_1r = 1/2 [e^{-i dr t/2}(cos(w' t/2) + i (dr/w') sin(w' t/2)) - 1]
//   a_rr = -i e^{-i dr t/2} (w01/w') sin(w' t/2)
//
// with w' = sqrt(2 w01^2 + dr^2). These are lab-frame (Schroedinger
// picture) amplitudes; they coincide with direct propagation of the gate
// Hamiltonian whose matrix elements are w01/2.
struct AnalyticRamanSolution {
  double omega_01 = 0.0;
  double delta_r = 0.0;
  double omega_prime = 0.0;

  AnalyticRamanSolution(double omega_01, double delta_r);
  // Identification against a gate spec: omega_01 = 2 * omega_0r.
  static AnalyticRamanSolution from_gate_spec(const model::SystemSpec& spec);
};

qcore::PureState analytic_gate_evolution(const AnalyticRamanSolution& sol, double t);

// Dispersive-limit survival probability of |0r>, (1 + cos(w01^2 t / 2 dr))/2.
double dispersive_survival(const AnalyticRamanSolution& sol, double t);

// Max state-fidelity deviation between the closed form and direct unitary
// propagation of h_gate over the grid. Requires all decay rates zero.
double crosscheck_analytic(const model::SystemSpec& spec, const std::vector<double>& t_grid);

}  // namespace rydsim::dynamics
