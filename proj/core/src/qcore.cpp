#include "rydsim/qcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rydsim::qcore {

namespace {

int checked_pow(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_levels(int levels_per_atom) {
  if (levels_per_atom != 3 && levels_per_atom != 5) {
    throw std::invalid_argument("levels_per_atom must be 3 or 5, got " +
                                std::to_string(levels_per_atom));
  }
}

void check_dim(int n_atoms, int levels_per_atom, long size, const char* what) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  check_levels(levels_per_atom);
  if (size != checked_pow(levels_per_atom, n_atoms)) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(size) +
                                " != levels_per_atom^n_atoms");
  }
}

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

int basis_index(const std::vector<LevelLabel>& levels, int levels_per_atom) {
  int idx = 0;
  for (LevelLabel l : levels) {
    int li = static_cast<int>(l);
    if (li < 0 || li >= levels_per_atom) {
      throw std::invalid_argument("level out of range for levels_per_atom");
    }
    idx = idx * levels_per_atom + li;
  }
  return idx;
}

PureState::PureState(int n_atoms, int levels_per_atom, Vector amplitudes)
    : n_atoms_(n_atoms), levels_per_atom_(levels_per_atom), amp_(std::move(amplitudes)) {
  check_dim(n_atoms_, levels_per_atom_, amp_.size(), "PureState");
}

PureState PureState::basis(int levels_per_atom, const std::vector<LevelLabel>& levels) {
  int n = static_cast<int>(levels.size());
  Vector v = Vector::Zero(checked_pow(levels_per_atom, n));
  v(basis_index(levels, levels_per_atom)) = 1.0;
  return PureState(n, levels_per_atom, std::move(v));
}

Complex PureState::amplitude(const std::vector<LevelLabel>& levels) const {
  if (static_cast<int>(levels.size()) != n_atoms_) {
    throw std::invalid_argument("amplitude: wrong number of atom labels");
  }
  return amp_(basis_index(levels, levels_per_atom_));
}

PureState PureState::normalized() const {
  double n = amp_.norm();
  if (n < 1e-300) throw std::invalid_argument("cannot normalize a zero state");
  PureState out(n_atoms_, levels_per_atom_, amp_ / n);
  if (std::abs(out.amp_.squaredNorm() - 1.0) > kNormTol) {
    throw std::runtime_error("normalization failed to reach unit norm");
  }
  return out;
}

DensityOperator::DensityOperator(int n_atoms, int levels_per_atom, Matrix matrix)
    : n_atoms_(n_atoms), levels_per_atom_(levels_per_atom), mat_(std::move(matrix)) {
  check_dim(n_atoms_, levels_per_atom_, mat_.rows(), "DensityOperator");
  if (mat_.rows() != mat_.cols()) throw std::invalid_argument("DensityOperator: not square");
  if (!is_hermitian(mat_, kHermitianTol)) {
    throw std::invalid_argument("DensityOperator: matrix not Hermitian within 1e-9");
  }
  if (std::abs(mat_.trace().real() - 1.0) > kTraceTol || std::abs(mat_.trace().imag()) > kTraceTol) {
    throw std::invalid_argument("DensityOperator: trace deviates from 1 beyond 1e-6");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + mat_.adjoint()),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenvalueFloor) {
    throw std::invalid_argument("DensityOperator: eigenvalue below -1e-8, not positive");
  }
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  PureState n = psi.normalized();
  return DensityOperator(n.n_atoms(), n.levels_per_atom(),
                         n.amplitudes() * n.amplitudes().adjoint());
}

double DensityOperator::purity() const { return (mat_ * mat_).trace().real(); }

double DensityOperator::population(const PureState& psi) const {
  if (psi.dim() != dim()) throw std::invalid_argument("population: dimension mismatch");
  return (psi.amplitudes().adjoint() * mat_ * psi.amplitudes())(0).real();
}

LinearOperator::LinearOperator(int n_atoms, int levels_per_atom, Matrix matrix, bool hermitian_hint)
    : n_atoms_(n_atoms),
      levels_per_atom_(levels_per_atom),
      mat_(std::move(matrix)),
      hermitian_(hermitian_hint) {
  check_dim(n_atoms_, levels_per_atom_, mat_.rows(), "LinearOperator");
  if (mat_.rows() != mat_.cols()) throw std::invalid_argument("LinearOperator: not square");
  if (hermitian_ && !is_hermitian(mat_, kHermitianTol)) {
    throw std::invalid_argument("LinearOperator: hermitian_hint set but matrix is not Hermitian");
  }
}

LinearOperator LinearOperator::identity(int n_atoms, int levels_per_atom) {
  int d = checked_pow(levels_per_atom, n_atoms);
  return LinearOperator(n_atoms, levels_per_atom, Matrix::Identity(d, d), true);
}

LinearOperator LinearOperator::single_atom_projector(int levels_per_atom, LevelLabel bra,
                                                     LevelLabel ket) {
  Matrix m = Matrix::Zero(levels_per_atom, levels_per_atom);
  int b = static_cast<int>(bra), k = static_cast<int>(ket);
  if (b >= levels_per_atom || k >= levels_per_atom) {
    throw std::invalid_argument("single_atom_projector: level out of range");
  }
  m(b, k) = 1.0;
  return LinearOperator(1, levels_per_atom, std::move(m), b == k);
}

PureState LinearOperator::apply(const PureState& psi) const {
  if (psi.dim() != dim() || psi.levels_per_atom() != levels_per_atom_) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  return PureState(n_atoms_, levels_per_atom_, mat_ * psi.amplitudes());
}

DensityOperator LinearOperator::conjugate(const DensityOperator& rho) const {
  if (rho.dim() != dim() || rho.levels_per_atom() != levels_per_atom_) {
    throw std::invalid_argument("conjugate: dimension mismatch");
  }
  return DensityOperator(n_atoms_, levels_per_atom_, mat_ * rho.matrix() * mat_.adjoint());
}

PureState tensor(const PureState& a, const PureState& b) {
  if (a.levels_per_atom() != b.levels_per_atom()) {
    throw std::invalid_argument("tensor: mismatched levels_per_atom");
  }
  Vector out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState(a.n_atoms() + b.n_atoms(), a.levels_per_atom(), std::move(out));
}

LinearOperator tensor(const LinearOperator& a, const LinearOperator& b) {
  if (a.levels_per_atom() != b.levels_per_atom()) {
    throw std::invalid_argument("tensor: mismatched levels_per_atom");
  }
  int da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return LinearOperator(a.n_atoms() + b.n_atoms(), a.levels_per_atom(), std::move(out),
                        a.hermitian_hint() && b.hermitian_hint());
}

LinearOperator embed_single_atom(const LinearOperator& op, int atom_index, int n_atoms) {
  if (op.n_atoms() != 1) throw std::invalid_argument("embed_single_atom: operator must be single-atom");
  if (atom_index < 0 || atom_index >= n_atoms) {
    throw std::invalid_argument("embed_single_atom: atom index out of range");
  }
  int d = op.levels_per_atom();
  LinearOperator out = (atom_index == 0) ? op : LinearOperator::identity(1, d);
  for (int a = 1; a < n_atoms; ++a) {
    out = tensor(out, (a == atom_index) ? op : LinearOperator::identity(1, d));
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  int n = rho.n_atoms();
  int d = rho.levels_per_atom();
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: atom index out of range");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate atom index");
    kept[k] = true;
  }
  std::vector<int> keep_sorted, traced;
  for (int a = 0; a < n; ++a) (kept[a] ? keep_sorted : traced).push_back(a);

  int nk = static_cast<int>(keep_sorted.size());
  int dk = checked_pow(d, nk);
  int dt = checked_pow(d, n - nk);

  // strides of each atom's digit in the full index
  std::vector<int> stride(n);
  for (int a = 0; a < n; ++a) stride[a] = checked_pow(d, n - 1 - a);

  auto expand = [&](int packed, const std::vector<int>& atoms) {
    int full = 0;
    for (int i = static_cast<int>(atoms.size()) - 1; i >= 0; --i) {
      full += (packed % d) * stride[atoms[i]];
      packed /= d;
    }
    return full;
  };

  Matrix out = Matrix::Zero(dk, dk);
  for (int r = 0; r < dk; ++r) {
    int rbase = expand(r, keep_sorted);
    for (int c = 0; c < dk; ++c) {
      int cbase = expand(c, keep_sorted);
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) {
        int toff = expand(t, traced);
        sum += rho.matrix()(rbase + toff, cbase + toff);
      }
      out(r, c) = sum;
    }
  }
  return DensityOperator(nk, d, std::move(out));
}

double fidelity(const DensityOperator& ideal, const DensityOperator& actual) {
  if (ideal.dim() != actual.dim() || ideal.levels_per_atom() != actual.levels_per_atom()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  Complex tr = (ideal.matrix() * actual.matrix()).trace();
  if (std::abs(tr.imag()) >= 1e-9) {
    throw std::runtime_error("fidelity: trace has imaginary part beyond 1e-9");
  }
  return tr.real();
}

}  // namespace rydsim::qcore
