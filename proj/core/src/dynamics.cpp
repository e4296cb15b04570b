#include "rydsim/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>

namespace rydsim::dynamics {

using qcore::Complex;
using qcore::Matrix;
using qcore::Vector;

double integration_step(double omega_max, double t_total) {
  if (t_total <= 0.0) throw std::invalid_argument("integration_step: t_total must be positive");
  double scale = std::max(omega_max, 1.0 / t_total);
  return (2.0 * M_PI / kStepDivisor) / scale;
}

double spectral_scale(const qcore::LinearOperator& h,
                      const std::vector<model::JumpChannel>& channels) {
  // the fastest coherent phase runs at the eigenvalue spread of H
  double scale = 0.0;
  if (h.matrix().cwiseAbs().maxCoeff() > 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    scale = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  }
  for (const auto& c : channels) scale = std::max(scale, c.rate);
  return std::max(scale, 1e-300);
}

HermitianPropagator::HermitianPropagator(const qcore::LinearOperator& h)
    : n_atoms_(h.n_atoms()), levels_(h.levels_per_atom()) {
  if (!qcore::is_hermitian(h.matrix(), qcore::kHermitianTol)) {
    throw std::invalid_argument("HermitianPropagator: Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

qcore::PureState HermitianPropagator::apply(const qcore::PureState& psi0, double t) const {
  if (psi0.dim() != eigenvectors_.rows()) {
    throw std::invalid_argument("HermitianPropagator: dimension mismatch");
  }
  Vector c = eigenvectors_.adjoint() * psi0.amplitudes();
  for (int i = 0; i < c.size(); ++i) c(i) *= std::exp(Complex(0.0, -eigenvalues_(i) * t));
  return qcore::PureState(n_atoms_, levels_, eigenvectors_ * c);
}

qcore::Matrix HermitianPropagator::matrix(double t) const {
  Vector phases(eigenvalues_.size());
  for (int i = 0; i < phases.size(); ++i) phases(i) = std::exp(Complex(0.0, -eigenvalues_(i) * t));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

qcore::PureState propagate_unitary(const qcore::LinearOperator& h, const qcore::PureState& psi0,
                                   double t) {
  HermitianPropagator prop(h);
  qcore::PureState out = prop.apply(psi0, t);
  if (std::abs(out.norm() - psi0.norm()) > qcore::kNormTol) {
    throw std::runtime_error("propagate_unitary: norm not preserved");
  }
  return out;
}

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;

// RK4 integrator on the density matrix in the form
//   d rho = -i (K rho - rho K^dag) + sum_c rate_c S_c rho S_c^dag,
// K = H - (i/2) sum_c rate_c S_c^dag S_c. Jump operators are applied
// sparse; the register operators here have O(dim) nonzeros.
class LindbladIntegrator {
 public:
  LindbladIntegrator(const qcore::LinearOperator& h,
                     const std::vector<model::JumpChannel>& channels) {
    if (!qcore::is_hermitian(h.matrix(), qcore::kHermitianTol)) {
      throw std::invalid_argument("propagate_lindblad: Hamiltonian is not Hermitian");
    }
    const int d = h.dim();
    Matrix a = Matrix::Zero(d, d);
    for (const auto& c : channels) {
      if (c.rate < 0) throw std::invalid_argument("propagate_lindblad: negative channel rate");
      if (c.op.dim() != d) throw std::invalid_argument("propagate_lindblad: channel dimension mismatch");
      if (c.rate == 0.0) continue;
      jumps_.emplace_back(c.op.matrix().sparseView(1.0, 1e-300), c.rate);
      a += c.rate * (c.op.matrix().adjoint() * c.op.matrix());
    }
    k_ = h.matrix() - Complex(0.0, 0.5) * a;
    scratch_.resize(d, d);
  }

  void rhs(const Matrix& rho, Matrix& out) {
    out.noalias() = k_ * rho;
    out.noalias() -= rho * k_.adjoint();
    out *= Complex(0.0, -1.0);
    for (const auto& [s, rate] : jumps_) {
      scratch_.noalias() = s * rho;
      out.noalias() += rate * (scratch_ * s.adjoint());
    }
  }

  void step(Matrix& rho, double h) {
    rhs(rho, k1_);
    tmp_ = rho + (0.5 * h) * k1_;
    rhs(tmp_, k2_);
    tmp_ = rho + (0.5 * h) * k2_;
    rhs(tmp_, k3_);
    tmp_ = rho + h * k3_;
    rhs(tmp_, k4_);
    rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  Matrix k_;
  std::vector<std::pair<SparseC, double>> jumps_;
  Matrix scratch_, tmp_, k1_, k2_, k3_, k4_;
};

void check_sampled_state(const Matrix& rho, double t) {
  double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-8) {
    throw std::runtime_error("propagate_lindblad: Hermiticity drift " + std::to_string(herm) +
                             " at t = " + std::to_string(t));
  }
  double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_err > qcore::kTraceTol) {
    throw std::runtime_error("propagate_lindblad: trace drift " + std::to_string(tr_err) +
                             " at t = " + std::to_string(t));
  }
}

double default_step(const qcore::LinearOperator& h,
                    const std::vector<model::JumpChannel>& channels, double t_total,
                    double dt_hint) {
  if (dt_hint > 0.0) return dt_hint;
  return integration_step(spectral_scale(h, channels), std::max(t_total, 1e-300));
}

}  // namespace

EvolutionResult propagate_lindblad(const qcore::LinearOperator& h,
                                   const std::vector<model::JumpChannel>& channels,
                                   const qcore::DensityOperator& rho0,
                                   const std::vector<double>& t_grid, double dt_hint) {
  if (t_grid.empty()) throw std::invalid_argument("propagate_lindblad: empty time grid");
  if (t_grid.front() < 0.0) throw std::invalid_argument("propagate_lindblad: grid starts before 0");
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] <= t_grid[i - 1]) {
      throw std::invalid_argument("propagate_lindblad: time grid must be strictly increasing");
    }
  }
  if (rho0.dim() != h.dim()) throw std::invalid_argument("propagate_lindblad: dimension mismatch");

  double dt = default_step(h, channels, t_grid.back(), dt_hint);
  LindbladIntegrator integ(h, channels);

  EvolutionResult out;
  Matrix rho = rho0.matrix();
  double t = 0.0;
  for (double target : t_grid) {
    double span = target - t;
    if (span > 0.0) {
      long n_steps = std::lround(std::ceil(span / dt - 1e-12));
      if (n_steps < 1) n_steps = 1;
      double step = span / static_cast<double>(n_steps);
      if (step < 1e-300) throw std::runtime_error("propagate_lindblad: step size underflow");
      for (long i = 0; i < n_steps; ++i) integ.step(rho, step);
      t = target;
    }
    check_sampled_state(rho, t);
    out.times.push_back(t);
    try {
      // symmetrize round-off before the positivity check in the constructor
      out.states.emplace_back(rho0.n_atoms(), rho0.levels_per_atom(),
                              (0.5 * (rho + rho.adjoint())).eval());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("propagate_lindblad: non-positive drift at t = " +
                               std::to_string(t) + ", aborting (" + e.what() + ")");
    }
  }
  return out;
}

Peak first_local_max(const std::vector<double>& ts, const std::vector<double>& ys) {
  auto all = local_maxima(ts, ys);
  return all.empty() ? Peak{} : all.front();
}

std::vector<Peak> local_maxima(const std::vector<double>& ts, const std::vector<double>& ys) {
  if (ts.size() != ys.size()) throw std::invalid_argument("local_maxima: size mismatch");
  std::vector<Peak> out;
  for (size_t i = 1; i + 1 < ys.size(); ++i) {
    if (ys[i] >= ys[i - 1] && ys[i] > ys[i + 1]) {
      double denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
      Peak p;
      p.found = true;
      if (std::abs(denom) < 1e-300) {
        p.t = ts[i];
        p.value = ys[i];
      } else {
        double shift = 0.5 * (ys[i - 1] - ys[i + 1]) / denom;
        double h = 0.5 * (ts[i + 1] - ts[i - 1]);
        p.t = ts[i] + shift * h;
        p.value = ys[i] - 0.25 * (ys[i - 1] - ys[i + 1]) * shift;
      }
      out.push_back(p);
    }
  }
  return out;
}

PeakStopResult propagate_to_first_peak(const qcore::LinearOperator& h,
                                       const std::vector<model::JumpChannel>& channels,
                                       const qcore::DensityOperator& rho0,
                                       const qcore::PureState& probe, double t_max,
                                       double dt_hint) {
  double dt = default_step(h, channels, t_max, dt_hint);
  LindbladIntegrator integ(h, channels);
  long n_steps = std::lround(std::ceil(t_max / dt));
  double step = t_max / static_cast<double>(n_steps);

  Matrix rho = rho0.matrix();
  const Vector& v = probe.amplitudes();
  std::vector<double> ts(1, 0.0), ps;
  ps.push_back(((v.adjoint() * rho * v)(0)).real());
  for (long i = 0; i < n_steps; ++i) {
    integ.step(rho, step);
    ts.push_back((i + 1) * step);
    ps.push_back(((v.adjoint() * rho * v)(0)).real());
    if (ps.size() >= 3) {
      size_t j = ps.size() - 2;
      if (ps[j] >= ps[j - 1] && ps[j] > ps[j + 1]) break;
    }
  }
  Peak peak = first_local_max(ts, ps);
  if (!peak.found) {
    throw std::runtime_error("propagate_to_first_peak: no local maximum within t_max");
  }

  EvolutionResult res = propagate_lindblad(h, channels, rho0, {peak.t}, dt_hint);
  PeakStopResult out{res.states.front(), peak.t, 0.0};
  out.population = out.state.population(probe);
  return out;
}

AnalyticRamanSolution::AnalyticRamanSolution(double omega_01_, double delta_r_)
    : omega_01(omega_01_), delta_r(delta_r_),
      omega_prime(std::sqrt(2.0 * omega_01_ * omega_01_ + delta_r_ * delta_r_)) {
  double lhs = omega_prime * omega_prime;
  double rhs = 2.0 * omega_01 * omega_01 + delta_r * delta_r;
  if (rhs > 0 && std::abs(lhs - rhs) > 1e-12 * rhs) {
    throw std::runtime_error("AnalyticRamanSolution: omega_prime identity violated");
  }
}

AnalyticRamanSolution AnalyticRamanSolution::from_gate_spec(const model::SystemSpec& spec) {
  if (spec.omega_0r != spec.omega_1r) {
    throw std::invalid_argument("AnalyticRamanSolution: requires omega_0r == omega_1r");
  }
  return AnalyticRamanSolution(2.0 * spec.omega_0r, spec.delta_r);
}

qcore::PureState analytic_gate_evolution(const AnalyticRamanSolution& sol, double t) {
  using qcore::LevelLabel;
  double wp = sol.omega_prime;
  Complex a0r, a1r, arr;
  if (wp == 0.0) {
    a0r = 1.0;
    a1r = arr = 0.0;
  } else {
    Complex ph = std::exp(Complex(0.0, -0.5 * sol.delta_r * t));
    double c = std::cos(0.5 * wp * t), s = std::sin(0.5 * wp * t);
    Complex core = ph * Complex(c, (sol.delta_r / wp) * s);
    a0r = 0.5 * (1.0 + core);
    a1r = 0.5 * (core - 1.0);
    arr = Complex(0.0, -1.0) * ph * (sol.omega_01 / wp) * s;
  }
  Vector amp = Vector::Zero(9);
  amp(qcore::basis_index({LevelLabel::g0, LevelLabel::ryd}, 3)) = a0r;
  amp(qcore::basis_index({LevelLabel::g1, LevelLabel::ryd}, 3)) = a1r;
  amp(qcore::basis_index({LevelLabel::ryd, LevelLabel::ryd}, 3)) = arr;
  qcore::PureState out(2, 3, std::move(amp));
  if (std::abs(out.amplitudes().squaredNorm() - 1.0) > 1e-12) {
    throw std::runtime_error("analytic_gate_evolution: norm deviates from 1 beyond 1e-12");
  }
  return out;
}

double dispersive_survival(const AnalyticRamanSolution& sol, double t) {
  if (sol.delta_r == 0.0) throw std::invalid_argument("dispersive_survival: delta_r must be nonzero");
  return 0.5 * (1.0 + std::cos(sol.omega_01 * sol.omega_01 * t / (2.0 * sol.delta_r)));
}

double crosscheck_analytic(const model::SystemSpec& spec, const std::vector<double>& t_grid) {
  if (spec.gamma_0r != 0.0 || spec.gamma_1r != 0.0) {
    throw std::invalid_argument("crosscheck_analytic: decay rates must be zero");
  }
  AnalyticRamanSolution sol = AnalyticRamanSolution::from_gate_spec(spec);
  HermitianPropagator prop(model::h_gate(spec));
  qcore::PureState psi0 =
      qcore::PureState::basis(3, {qcore::LevelLabel::g0, qcore::LevelLabel::ryd});
  double worst = 0.0;
  for (double t : t_grid) {
    qcore::PureState numeric = prop.apply(psi0, t);
    qcore::PureState analytic = analytic_gate_evolution(sol, t);
    double overlap = std::norm(analytic.amplitudes().dot(numeric.amplitudes()));
    worst = std::max(worst, std::abs(1.0 - overlap));
  }
  return worst;
}

}  // namespace rydsim::dynamics
