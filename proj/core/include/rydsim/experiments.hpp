// Parameter sweeps over the blockade/decay plane: population curves, the
// entanglement-probability surface, disentanglement curves, gate and
// teleportation fidelities. All figure-style runs are expressed in
// rescaled units (unit Rabi frequency, dimensionless ratios), which the
// dynamics are invariant under.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rydsim/protocol.hpp"

namespace rydsim::experiments {

enum class Quantity {
  p_00,
  p_epr,
  p_rr,
  p_10,
  p_0r,
  p_1r,
  gate_fidelity,
  teleport_fidelity,
};

std::string quantity_name(Quantity q);

struct SweepGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  Quantity quantity = Quantity::p_epr;

  void validate() const;
  // all coordinate tuples in row-major axis order
  std::vector<std::vector<double>> points() const;
};

struct SweepRecord {
  std::vector<double> coordinates;
  double value = 0.0;
};

// Evaluate one value per grid point, possibly across threads; records come
// back sorted by coordinates regardless of the execution order. Values
// must land in [0, 1 + 1e-6].
using PointFn = std::function<double(const std::vector<double>&)>;
std::vector<SweepRecord> sweep(const SweepGrid& grid, const PointFn& fn, int threads = 0);

// Effective worker count: `requested` (0 = all cores) capped by the
// RYDSIM_THREADS environment variable.
int resolve_threads(int requested);

// Uniform tabular result for CSV emission.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Populations of |00>, |EPR>, |rr> under the EPR drive from |00>, gamma=0,
// against rescaled time omega_0r * t.
SweepTable fig3_populations(double delta_over_omega, double t_max_rescaled, int n_points);

// P_EPR at its first local maximum over the (delta_r/omega, gamma/omega)
// plane (Lindblad propagation per grid point).
SweepTable fig4_surface(const std::vector<double>& delta_grid,
                        const std::vector<double>& gamma_grid, int threads = 0);

// Conditional-transfer and blockade curves of the gate stage: population
// of |10> from |00> (transfer) and survival of |0r> (blockade) against
// omega_01 * t. gamma_over_omega is the total Rydberg decay over omega_01.
SweepTable fig5_disentangle(double delta_over_omega, double gamma_over_omega,
                            double t_max_rescaled, int n_points);

// Gate fidelity F = Tr(rho_ideal rho(t_gate)) from the benchmark initial
// state (|0>+sqrt(2)|1>)/sqrt(3) (x) (|0>+|r>)/sqrt(2) over delta_r/omega_01
// for each gamma/omega_01 in the list.
SweepTable fig6_gate_fidelity(const std::vector<double>& delta_grid,
                              const std::vector<double>& gamma_list, int threads = 0);
double gate_fidelity_point(double delta_over_omega, double gamma_over_omega);

// Teleport fidelity at delta_r/omega in {(1-p), 1, (1+p)} * base ratio.
SweepTable robustness_sweep(const model::SystemSpec& base_spec, double delta_perturbation,
                            int threads = 0);

}  // namespace rydsim::experiments
