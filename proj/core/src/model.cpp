#include "rydsim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rydsim::model {

using qcore::LevelLabel;
using qcore::LinearOperator;
using qcore::Matrix;

namespace {

LinearOperator proj(LevelLabel bra, LevelLabel ket) {
  return LinearOperator::single_atom_projector(3, bra, ket);
}

// |rr><rr| on a pair of atoms within an n-atom register.
Matrix blockade_term(int atom_a, int atom_b, int n_atoms) {
  Matrix pa = qcore::embed_single_atom(proj(LevelLabel::ryd, LevelLabel::ryd), atom_a, n_atoms).matrix();
  Matrix pb = qcore::embed_single_atom(proj(LevelLabel::ryd, LevelLabel::ryd), atom_b, n_atoms).matrix();
  return pa * pb;
}

}  // namespace

SystemSpec SystemSpec::uniform(double omega, double delta_r, double gamma) {
  SystemSpec s;
  s.omega_0r = omega;
  s.omega_1r = omega;
  s.delta_r = delta_r;
  s.gamma_0r = gamma;
  s.gamma_1r = gamma;
  s.validate();
  return s;
}

void SystemSpec::validate() const {
  if (omega_0r < 0 || omega_1r < 0) throw std::invalid_argument("SystemSpec: Rabi magnitudes must be >= 0");
  if (gamma_0r < 0 || gamma_1r < 0) throw std::invalid_argument("SystemSpec: decay rates must be >= 0");
  // delta_r may have either sign
}

void IntermediateStateSpec::validate() const {
  if (delta_p == 0.0) throw std::invalid_argument("IntermediateStateSpec: delta_p must be nonzero");
  if (gamma_p < 0) throw std::invalid_argument("IntermediateStateSpec: gamma_p must be >= 0");
}

qcore::LinearOperator h_epr(const SystemSpec& spec) {
  spec.validate();
  Matrix h = Matrix::Zero(9, 9);
  for (int atom = 0; atom < 2; ++atom) {
    Matrix drive = qcore::embed_single_atom(proj(LevelLabel::ryd, LevelLabel::g0), atom, 2).matrix();
    h += spec.omega_0r * (drive + drive.adjoint());
  }
  h += spec.delta_r * blockade_term(0, 1, 2);
  return LinearOperator(2, 3, std::move(h), true);
}

qcore::LinearOperator h_epr_effective(const SystemSpec& spec) {
  spec.validate();
  qcore::Vector epr = qcore::Vector::Zero(9);
  int i0r = qcore::basis_index({LevelLabel::g0, LevelLabel::ryd}, 3);
  int ir0 = qcore::basis_index({LevelLabel::ryd, LevelLabel::g0}, 3);
  epr(i0r) = epr(ir0) = 1.0 / std::sqrt(2.0);
  qcore::Vector g00 = qcore::Vector::Zero(9);
  g00(0) = 1.0;
  Matrix h = std::sqrt(2.0) * spec.omega_0r * (epr * g00.adjoint());
  h += h.adjoint().eval();
  return LinearOperator(2, 3, std::move(h), true);
}

qcore::LinearOperator h_gate(const SystemSpec& spec) {
  spec.validate();
  Matrix d0 = qcore::embed_single_atom(proj(LevelLabel::ryd, LevelLabel::g0), 0, 2).matrix();
  Matrix d1 = qcore::embed_single_atom(proj(LevelLabel::ryd, LevelLabel::g1), 0, 2).matrix();
  Matrix h = spec.omega_0r * (d0 + d0.adjoint()) + spec.omega_1r * (d1 + d1.adjoint());
  h += spec.delta_r * blockade_term(0, 1, 2);
  return LinearOperator(2, 3, std::move(h), true);
}

std::vector<JumpChannel> decay_channels(const SystemSpec& spec, int n_atoms,
                                        const std::vector<int>& atoms,
                                        const std::vector<DecayTarget>& targets) {
  spec.validate();
  std::vector<JumpChannel> out;
  for (int atom : atoms) {
    if (atom < 0 || atom >= n_atoms) throw std::invalid_argument("decay_channels: atom outside register");
    for (DecayTarget target : targets) {
      LevelLabel k = (target == DecayTarget::to_g0) ? LevelLabel::g0 : LevelLabel::g1;
      double rate = (target == DecayTarget::to_g0) ? spec.gamma_0r : spec.gamma_1r;
      out.push_back({qcore::embed_single_atom(proj(k, LevelLabel::ryd), atom, n_atoms), rate});
    }
  }
  return out;
}

double scattering_rate(const IntermediateStateSpec& ispec) {
  ispec.validate();
  double ratio = ispec.omega_laser / ispec.delta_p;
  return ispec.gamma_p * ratio * ratio;
}

std::vector<JumpChannel> scattering_channels(
    const IntermediateStateSpec& ispec, int n_atoms,
    const std::vector<std::pair<int, qcore::LevelLabel>>& driven) {
  double rate = 2.0 * scattering_rate(ispec);
  std::vector<JumpChannel> out;
  for (auto [atom, k] : driven) {
    if (atom < 0 || atom >= n_atoms) throw std::invalid_argument("scattering_channels: atom outside register");
    if (k != qcore::LevelLabel::g0 && k != qcore::LevelLabel::g1) {
      throw std::invalid_argument("scattering_channels: driven state must be a ground state");
    }
    out.push_back({qcore::embed_single_atom(proj(k, k), atom, n_atoms), rate});
    out.push_back({qcore::embed_single_atom(proj(k, qcore::LevelLabel::ryd), atom, n_atoms), rate});
  }
  return out;
}

}  // namespace rydsim::model
