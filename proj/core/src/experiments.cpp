#include "rydsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace rydsim::experiments {

using model::DecayTarget;
using model::SystemSpec;
using qcore::DensityOperator;
using qcore::LevelLabel;
using qcore::PureState;
using qcore::Vector;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

PureState epr_probe() {
  Vector v = Vector::Zero(9);
  v(qcore::basis_index({LevelLabel::g0, LevelLabel::ryd}, 3)) = 1.0 / kSqrt2;
  v(qcore::basis_index({LevelLabel::ryd, LevelLabel::g0}, 3)) = 1.0 / kSqrt2;
  return PureState(2, 3, std::move(v));
}

PureState basis2(LevelLabel a, LevelLabel b) { return PureState::basis(3, {a, b}); }

// populations can undershoot zero by integrator round-off; anything larger
// is a real defect
double sanitize_value(double v) {
  if (!(v >= -1e-9 && v <= 1.0 + 1e-6)) {
    throw std::runtime_error("sweep value outside [0, 1 + 1e-6]: " + std::to_string(v));
  }
  return std::max(v, 0.0);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

// gate-stage spec for a user-facing two-photon Rabi frequency omega_01 = 1:
// matrix elements omega_01/2, per-channel decay gamma_total/2.
SystemSpec gate_spec_rescaled(double delta_over_omega, double gamma_over_omega) {
  SystemSpec s;
  s.omega_0r = s.omega_1r = 0.5;
  s.delta_r = delta_over_omega;
  s.gamma_0r = s.gamma_1r = 0.5 * gamma_over_omega;
  return s;
}

double first_epr_peak(double delta_over_omega, double gamma_over_omega) {
  SystemSpec s;
  s.omega_0r = s.omega_1r = 1.0;
  s.delta_r = delta_over_omega;
  s.gamma_0r = gamma_over_omega;
  s.gamma_1r = 0.0;
  auto channels = model::decay_channels(s, 2, {0, 1}, {DecayTarget::to_g0});
  DensityOperator rho0 = DensityOperator::from_pure(basis2(LevelLabel::g0, LevelLabel::g0));
  auto peak = dynamics::propagate_to_first_peak(model::h_epr(s), channels, rho0, epr_probe(), 2.0);
  return peak.population;
}

}  // namespace

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::p_00: return "p00";
    case Quantity::p_epr: return "p_epr";
    case Quantity::p_rr: return "p_rr";
    case Quantity::p_10: return "p10";
    case Quantity::p_0r: return "p0r";
    case Quantity::p_1r: return "p1r";
    case Quantity::gate_fidelity: return "gate_fidelity";
    case Quantity::teleport_fidelity: return "teleport_fidelity";
  }
  return "unknown";
}

void SweepGrid::validate() const {
  if (axes.empty()) throw std::invalid_argument("SweepGrid: no axes");
  for (const auto& [name, values] : axes) {
    if (values.empty()) throw std::invalid_argument("SweepGrid: empty axis " + name);
    for (double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("SweepGrid: non-finite value on axis " + name);
    }
  }
}

std::vector<std::vector<double>> SweepGrid::points() const {
  validate();
  std::vector<std::vector<double>> out{{}};
  for (const auto& [name, values] : axes) {
    std::vector<std::vector<double>> next;
    next.reserve(out.size() * values.size());
    for (const auto& prefix : out) {
      for (double v : values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

int resolve_threads(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int n = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("RYDSIM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, n);
}

std::vector<SweepRecord> sweep(const SweepGrid& grid, const PointFn& fn, int threads) {
  auto points = grid.points();
  std::vector<SweepRecord> records(points.size());
  int n_threads = std::min<int>(resolve_threads(threads), static_cast<int>(points.size()));

  auto work = [&](std::atomic<size_t>& cursor) {
    for (size_t i = cursor.fetch_add(1); i < points.size(); i = cursor.fetch_add(1)) {
      records[i] = SweepRecord{points[i], sanitize_value(fn(points[i]))};
    }
  };

  std::atomic<size_t> cursor{0};
  if (n_threads <= 1) {
    work(cursor);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        try {
          work(cursor);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          cursor.store(points.size());  // stop the other workers
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.coordinates < b.coordinates;
  });
  return records;
}

SweepTable fig3_populations(double delta_over_omega, double t_max_rescaled, int n_points) {
  if (n_points < 2) throw std::invalid_argument("fig3_populations: need at least 2 points");
  SystemSpec s;
  s.omega_0r = s.omega_1r = 1.0;
  s.delta_r = delta_over_omega;
  dynamics::HermitianPropagator prop(model::h_epr(s));
  PureState psi0 = basis2(LevelLabel::g0, LevelLabel::g0);
  const Vector epr = epr_probe().amplitudes();

  SweepTable table;
  table.columns = {"omega_t", "p00", "p_epr", "p_rr"};
  for (double t : linspace(0.0, t_max_rescaled, n_points)) {
    PureState psi = prop.apply(psi0, t);
    double p00 = sanitize_value(std::norm(psi.amplitudes()(0)));
    double pepr = sanitize_value(std::norm(epr.dot(psi.amplitudes())));
    double prr = sanitize_value(std::norm(psi.amplitudes()(8)));
    table.rows.push_back({t, p00, pepr, prr});
  }
  return table;
}

SweepTable fig4_surface(const std::vector<double>& delta_grid,
                        const std::vector<double>& gamma_grid, int threads) {
  SweepGrid grid;
  grid.axes = {{"delta_over_omega", delta_grid}, {"gamma_over_omega", gamma_grid}};
  grid.quantity = Quantity::p_epr;
  auto records = sweep(grid, [](const std::vector<double>& c) { return first_epr_peak(c[0], c[1]); },
                       threads);

  SweepTable table;
  table.columns = {"delta_over_omega", "gamma_over_omega", "p_epr_peak"};
  for (const auto& r : records) table.rows.push_back({r.coordinates[0], r.coordinates[1], r.value});
  return table;
}

SweepTable fig5_disentangle(double delta_over_omega, double gamma_over_omega,
                            double t_max_rescaled, int n_points) {
  SystemSpec s = gate_spec_rescaled(delta_over_omega, gamma_over_omega);
  auto channels = model::decay_channels(s, 2, {0, 1}, {DecayTarget::to_g0, DecayTarget::to_g1});

  std::vector<double> ts = linspace(0.0, t_max_rescaled, n_points);
  std::vector<double> grid(ts.begin() + 1, ts.end());

  auto run = [&](LevelLabel q2, const PureState& probe) {
    DensityOperator rho0 = DensityOperator::from_pure(basis2(LevelLabel::g0, q2));
    auto res = dynamics::propagate_lindblad(model::h_gate(s), channels, rho0, grid);
    std::vector<double> out{rho0.population(probe)};
    for (const auto& st : res.states) out.push_back(st.population(probe));
    return out;
  };
  // transfer |00> -> |10>; blockade survival of |0r>
  std::vector<double> transfer = run(LevelLabel::g0, basis2(LevelLabel::g1, LevelLabel::g0));
  std::vector<double> blockade = run(LevelLabel::ryd, basis2(LevelLabel::g0, LevelLabel::ryd));

  SweepTable table;
  table.columns = {"omega_t", "p_transfer", "p_blockade"};
  for (size_t i = 0; i < ts.size(); ++i) {
    table.rows.push_back({ts[i], sanitize_value(transfer[i]), sanitize_value(blockade[i])});
  }
  return table;
}

double gate_fidelity_point(double delta_over_omega, double gamma_over_omega) {
  SystemSpec s = gate_spec_rescaled(delta_over_omega, gamma_over_omega);
  Vector a1(3), a2(3);
  a1 << 1.0 / std::sqrt(3.0), kSqrt2 / std::sqrt(3.0), 0.0;
  a2 << 1.0 / kSqrt2, 0.0, 1.0 / kSqrt2;
  PureState psi0 = qcore::tensor(PureState(1, 3, a1), PureState(1, 3, a2));
  DensityOperator rho0 = DensityOperator::from_pure(psi0);
  DensityOperator ideal =
      DensityOperator::from_pure(protocol::cnot_like_gate_ideal(psi0));
  DensityOperator rho = protocol::cnot_like_gate(rho0, s, protocol::Mode::lindblad);
  return qcore::fidelity(ideal, rho);
}

SweepTable fig6_gate_fidelity(const std::vector<double>& delta_grid,
                              const std::vector<double>& gamma_list, int threads) {
  SweepGrid grid;
  grid.axes = {{"delta_over_omega", delta_grid}, {"gamma_over_omega", gamma_list}};
  grid.quantity = Quantity::gate_fidelity;
  auto records = sweep(
      grid, [](const std::vector<double>& c) { return gate_fidelity_point(c[0], c[1]); }, threads);

  SweepTable table;
  table.columns = {"delta_over_omega", "gamma_over_omega", "gate_fidelity"};
  for (const auto& r : records) table.rows.push_back({r.coordinates[0], r.coordinates[1], r.value});
  return table;
}

SweepTable robustness_sweep(const SystemSpec& base_spec, double delta_perturbation, int threads) {
  if (delta_perturbation < 0.0 || delta_perturbation > 0.5) {
    throw std::invalid_argument("robustness_sweep: perturbation fraction must be in [0, 0.5]");
  }
  double omega = base_spec.omega_0r;
  double base_ratio = base_spec.delta_r / omega;
  std::vector<double> ratios{base_ratio};
  if (delta_perturbation > 0.0) {
    ratios = {base_ratio * (1.0 - delta_perturbation), base_ratio,
              base_ratio * (1.0 + delta_perturbation)};
  }

  SweepGrid grid;
  grid.axes = {{"delta_over_omega", ratios}};
  grid.quantity = Quantity::teleport_fidelity;
  protocol::InputQubitSpec input{1.0 / kSqrt2, 1.0 / kSqrt2};
  auto records = sweep(
      grid,
      [&](const std::vector<double>& c) {
        SystemSpec s = base_spec;
        s.delta_r = c[0] * omega;
        return protocol::teleport(input, s, protocol::Mode::lindblad).average_fidelity;
      },
      threads);

  SweepTable table;
  table.columns = {"delta_over_omega", "teleport_fidelity"};
  for (const auto& r : records) table.rows.push_back({r.coordinates[0], r.value});
  return table;
}

}  // namespace rydsim::experiments
