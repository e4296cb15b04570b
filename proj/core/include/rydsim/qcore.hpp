// Complex linear algebra for small multi-atom Hilbert spaces: states,
// operators, tensor products, partial trace, fidelity.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace rydsim::qcore {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Symbolic atomic levels. The ordering fixes the basis-index layout:
// g0 < g1 < ryd (< p_int < g1prime for the extended 5-level atom).
enum class LevelLabel : int {
  g0 = 0,
  g1 = 1,
  ryd = 2,
  p_int = 3,
  g1prime = 4,
};

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kTraceTol = 1e-6;
inline constexpr double kEigenvalueFloor = -1e-8;
inline constexpr double kNormTol = 1e-9;

// Basis indices are row-major with atom 0 most significant:
// index = sum_j level_j * d^(n-1-j).
int basis_index(const std::vector<LevelLabel>& levels, int levels_per_atom);

// Amplitude vector over a tensor product of identical d-level atoms.
class PureState {
 public:
  PureState(int n_atoms, int levels_per_atom, Vector amplitudes);

  // Basis ket |l_0 l_1 ... l_{n-1}>.
  static PureState basis(int levels_per_atom, const std::vector<LevelLabel>& levels);

  int n_atoms() const { return n_atoms_; }
  int levels_per_atom() const { return levels_per_atom_; }
  int dim() const { return static_cast<int>(amp_.size()); }
  const Vector& amplitudes() const { return amp_; }
  Complex amplitude(const std::vector<LevelLabel>& levels) const;

  double norm() const { return amp_.norm(); }
  PureState normalized() const;

 private:
  int n_atoms_;
  int levels_per_atom_;
  Vector amp_;
};

// Hermitian, positive-semidefinite, trace-1 matrix on the same space.
// Construction validates all three properties (eigenvalue floor -1e-8
// rather than a Cholesky test, to tolerate integrator round-off).
class DensityOperator {
 public:
  DensityOperator(int n_atoms, int levels_per_atom, Matrix matrix);

  static DensityOperator from_pure(const PureState& psi);

  int n_atoms() const { return n_atoms_; }
  int levels_per_atom() const { return levels_per_atom_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

  double trace() const { return mat_.trace().real(); }
  double purity() const;
  // <psi|rho|psi> for a pure probe state.
  double population(const PureState& psi) const;

 private:
  int n_atoms_;
  int levels_per_atom_;
  Matrix mat_;
};

// General square operator (Hamiltonians, jump operators, unitaries).
// hermitian_hint declares intent; it is checked at construction.
class LinearOperator {
 public:
  LinearOperator(int n_atoms, int levels_per_atom, Matrix matrix, bool hermitian_hint);

  static LinearOperator identity(int n_atoms, int levels_per_atom);
  // |bra><ket| on a single atom.
  static LinearOperator single_atom_projector(int levels_per_atom, LevelLabel bra, LevelLabel ket);

  int n_atoms() const { return n_atoms_; }
  int levels_per_atom() const { return levels_per_atom_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  bool hermitian_hint() const { return hermitian_; }

  PureState apply(const PureState& psi) const;
  // U rho U^dagger (for unitary U).
  DensityOperator conjugate(const DensityOperator& rho) const;

 private:
  int n_atoms_;
  int levels_per_atom_;
  Matrix mat_;
  bool hermitian_;
};

PureState tensor(const PureState& a, const PureState& b);
LinearOperator tensor(const LinearOperator& a, const LinearOperator& b);

// Extend a single-atom operator to an n-atom register, identity elsewhere.
LinearOperator embed_single_atom(const LinearOperator& op, int atom_index, int n_atoms);

// Trace out all atoms not in `keep`; kept atoms stay in ascending order.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);

// F = Tr(rho_ideal rho). Exact fidelity when the ideal state is pure.
double fidelity(const DensityOperator& ideal, const DensityOperator& actual);

bool is_hermitian(const Matrix& m, double tol);

}  // namespace rydsim::qcore
