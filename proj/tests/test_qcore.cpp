#include <doctest.h>

#include "rydsim/qcore.hpp"
#include "support/oracles.hpp"

using namespace rydsim;
using qcore::Complex;
using qcore::DensityOperator;
using qcore::LevelLabel;
using qcore::LinearOperator;
using qcore::Matrix;
using qcore::PureState;
using qcore::Vector;

namespace {
const double kSqrt2Inv = 1.0 / std::sqrt(2.0);

PureState ket(std::initializer_list<LevelLabel> levels) {
  return PureState::basis(3, std::vector<LevelLabel>(levels));
}
}  // namespace

TEST_CASE("basis index layout is row-major with atom 0 most significant") {
  CHECK(qcore::basis_index({LevelLabel::g0, LevelLabel::g0}, 3) == 0);
  CHECK(qcore::basis_index({LevelLabel::g0, LevelLabel::ryd}, 3) == 2);
  CHECK(qcore::basis_index({LevelLabel::ryd, LevelLabel::g0}, 3) == 6);
  CHECK(qcore::basis_index({LevelLabel::ryd, LevelLabel::ryd}, 3) == 8);
  CHECK(qcore::basis_index({LevelLabel::g1prime}, 5) == 4);
}

TEST_CASE("tensor of basis kets") {
  PureState p = tensor(ket({LevelLabel::g0}), ket({LevelLabel::g0}));
  CHECK(p.dim() == 9);
  CHECK(p.amplitudes()(0) == Complex(1.0, 0.0));
  CHECK(p.amplitudes().tail(8).norm() == 0.0);
}

TEST_CASE("tensor of identities") {
  LinearOperator i9 = tensor(LinearOperator::identity(1, 3), LinearOperator::identity(1, 3));
  CHECK((i9.matrix() - Matrix::Identity(9, 9)).norm() == 0.0);
}

TEST_CASE("tensor of a superposition with |r>") {
  Vector v(3);
  v << kSqrt2Inv, 0.0, kSqrt2Inv;
  PureState p = tensor(PureState(1, 3, v), ket({LevelLabel::ryd}));
  // amplitudes 1/sqrt(2) at |0r| (index 2) and |rr> (index 8)
  CHECK(p.amplitudes()(2).real() == doctest::Approx(kSqrt2Inv).epsilon(1e-15));
  CHECK(p.amplitudes()(8).real() == doctest::Approx(kSqrt2Inv).epsilon(1e-15));
  CHECK(std::norm(p.amplitudes()(2)) + std::norm(p.amplitudes()(8)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tensor rejects mismatched levels_per_atom") {
  PureState a = PureState::basis(3, {LevelLabel::g0});
  PureState b = PureState::basis(5, {LevelLabel::g0});
  CHECK_THROWS_AS(tensor(a, b), std::invalid_argument);
}

TEST_CASE("tensor is associative") {
  auto gen = oracles::rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    int levels = rep % 2 == 0 ? 3 : 5;
    PureState a = oracles::random_pure(1, levels, gen);
    PureState b = oracles::random_pure(1, levels, gen);
    PureState c = oracles::random_pure(1, levels, gen);
    Vector lhs = tensor(tensor(a, b), c).amplitudes();
    Vector rhs = tensor(a, tensor(b, c)).amplitudes();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("embed sigma_x on atom 0 of 2 equals sigma_x (x) I") {
  Matrix sx = Matrix::Zero(3, 3);
  sx(0, 1) = sx(1, 0) = 1.0;
  LinearOperator op(1, 3, sx, true);
  Matrix embedded = embed_single_atom(op, 0, 2).matrix();
  CHECK((embedded - oracles::kron(sx, Matrix::Identity(3, 3))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedded raising operator creates a single excitation") {
  LinearOperator r_from_0 = LinearOperator::single_atom_projector(3, LevelLabel::ryd, LevelLabel::g0);
  PureState out = embed_single_atom(r_from_0, 1, 2).apply(ket({LevelLabel::g0, LevelLabel::g0}));
  CHECK(out.amplitudes()(2) == Complex(1.0, 0.0));  // |0r>
}

TEST_CASE("embed on the last atom matches the explicit Kronecker oracle") {
  auto gen = oracles::rng(5);
  Matrix m = oracles::random_density(3, gen);  // any 3x3 works here
  LinearOperator op(1, 3, m, false);
  Matrix embedded = embed_single_atom(op, 2, 3).matrix();
  Matrix expected =
      oracles::kron(oracles::kron(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), m);
  CHECK((embedded - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("embed rejects out-of-range atom index") {
  CHECK_THROWS_AS(embed_single_atom(LinearOperator::identity(1, 3), 2, 2), std::invalid_argument);
}

TEST_CASE("partial trace of a product basis state") {
  DensityOperator rho = DensityOperator::from_pure(ket({LevelLabel::g0, LevelLabel::g0}));
  DensityOperator reduced = partial_trace(rho, {0});
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace of the maximally entangled pair") {
  Vector v = Vector::Zero(9);
  v(2) = v(6) = kSqrt2Inv;  // (|0r> + |r0>)/sqrt(2)
  DensityOperator rho = DensityOperator::from_pure(PureState(2, 3, v));
  DensityOperator reduced = partial_trace(rho, {0});
  // hand computation: diag(1/2, 0, 1/2) in (g0, g1, ryd) order
  CHECK(reduced.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(reduced.matrix()(1, 1)) < 1e-15);
  CHECK(reduced.matrix()(2, 2).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(reduced.matrix()(0, 2)) < 1e-15);
}

TEST_CASE("partial trace keeping all atoms is the identity map") {
  auto gen = oracles::rng(7);
  DensityOperator rho = oracles::random_rho(2, 3, gen);
  DensityOperator same = partial_trace(rho, {0, 1});
  CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace rejects an empty keep set") {
  DensityOperator rho = DensityOperator::from_pure(ket({LevelLabel::g0, LevelLabel::g0}));
  CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
}

TEST_CASE("partial trace of a product density operator recovers the factor") {
  auto gen = oracles::rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    Matrix a = oracles::random_density(3, gen);
    Matrix b = oracles::random_density(9, gen);
    DensityOperator rho(3, 3, oracles::kron(a, b));
    DensityOperator ra = partial_trace(rho, {0});
    CHECK((ra.matrix() - a).cwiseAbs().maxCoeff() < 1e-12);
    DensityOperator rb = partial_trace(rho, {1, 2});
    CHECK((rb.matrix() - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ra.trace() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fidelity of a pure state with itself is 1") {
  DensityOperator rho = DensityOperator::from_pure(ket({LevelLabel::ryd}));
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fidelity of orthogonal states is 0") {
  DensityOperator a = DensityOperator::from_pure(ket({LevelLabel::g0}));
  DensityOperator b = DensityOperator::from_pure(ket({LevelLabel::ryd}));
  CHECK(fidelity(a, b) == doctest::Approx(0.0));
}

TEST_CASE("fidelity against a classical mixture") {
  DensityOperator pure = DensityOperator::from_pure(ket({LevelLabel::g0}));
  Matrix mix = Matrix::Zero(3, 3);
  mix(0, 0) = 0.7;
  mix(1, 1) = 0.3;
  DensityOperator rho(1, 3, mix);
  CHECK(fidelity(pure, rho) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("fidelity is linear in its second argument") {
  auto gen = oracles::rng(99);
  DensityOperator ideal = DensityOperator::from_pure(oracles::random_pure(1, 3, gen));
  for (int rep = 0; rep < 10; ++rep) {
    DensityOperator a = oracles::random_rho(1, 3, gen);
    DensityOperator b = oracles::random_rho(1, 3, gen);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double w = uni(gen);
    DensityOperator mix(1, 3, w * a.matrix() + (1.0 - w) * b.matrix());
    double lhs = fidelity(ideal, mix);
    double rhs = w * fidelity(ideal, a) + (1.0 - w) * fidelity(ideal, b);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("fidelity rejects mismatched dimensions") {
  DensityOperator a = DensityOperator::from_pure(ket({LevelLabel::g0}));
  DensityOperator b = DensityOperator::from_pure(ket({LevelLabel::g0, LevelLabel::g0}));
  CHECK_THROWS_AS(fidelity(a, b), std::invalid_argument);
}

TEST_CASE("density operator validation") {
  SUBCASE("non-Hermitian matrix is rejected") {
    Matrix m = Matrix::Identity(3, 3) / 3.0;
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityOperator(1, 3, m), std::invalid_argument);
  }
  SUBCASE("wrong trace is rejected") {
    CHECK_THROWS_AS(DensityOperator(1, 3, 0.9 * Matrix::Identity(3, 3) / 3.0),
                    std::invalid_argument);
  }
  SUBCASE("negative eigenvalue beyond the floor is rejected") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.001;
    m(1, 1) = -0.001;
    CHECK_THROWS_AS(DensityOperator(1, 3, m), std::invalid_argument);
  }
  SUBCASE("tiny negative eigenvalues within the floor pass") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.0 + 1e-9;
    m(1, 1) = -1e-9;
    CHECK_NOTHROW(DensityOperator(1, 3, m));
  }
}

TEST_CASE("five-level atoms tensor and trace consistently") {
  auto gen = oracles::rng(31);
  Matrix a = oracles::random_density(5, gen);
  Matrix b = oracles::random_density(5, gen);
  DensityOperator rho(2, 5, oracles::kron(a, b));
  CHECK((partial_trace(rho, {1}).matrix() - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalized construction enforces unit norm") {
  Vector v(3);
  v << 3.0, 0.0, 4.0;
  PureState p = PureState(1, 3, v).normalized();
  CHECK(std::abs(p.amplitudes().squaredNorm() - 1.0) < 1e-9);
}

TEST_CASE("hermitian hint is validated") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(LinearOperator(1, 3, m, true), std::invalid_argument);
  CHECK_NOTHROW(LinearOperator(1, 3, m, false));
}
