#include <doctest.h>

#include "rydsim/dynamics.hpp"
#include "rydsim/model.hpp"
#include "support/oracles.hpp"

using namespace rydsim;
using model::DecayTarget;
using model::IntermediateStateSpec;
using model::SystemSpec;
using qcore::LevelLabel;
using qcore::Matrix;
using qcore::PureState;
using qcore::Vector;

namespace {

// indices in the 2-atom, 3-level register
constexpr int i00 = 0, i0r = 2, i10 = 3, ir0 = 6, irr = 8;

// hand-assembled EPR Hamiltonian: drives on both atoms plus blockade
Matrix h_epr_oracle(double omega, double delta) {
  Matrix h = Matrix::Zero(9, 9);
  // atom 0: |r l2><0 l2| for l2 = 0,1,2 -> rows 6,7,8 from cols 0,1,2
  for (int l2 = 0; l2 < 3; ++l2) {
    h(6 + l2, 0 + l2) = omega;
    h(0 + l2, 6 + l2) = omega;
  }
  // atom 1: |l1 r><l1 0|
  for (int l1 = 0; l1 < 3; ++l1) {
    h(3 * l1 + 2, 3 * l1 + 0) = omega;
    h(3 * l1 + 0, 3 * l1 + 2) = omega;
  }
  h(irr, irr) = delta;
  return h;
}

// hand-assembled gate Hamiltonian: drives on atom 0 only
Matrix h_gate_oracle(double omega, double delta) {
  Matrix h = Matrix::Zero(9, 9);
  for (int l2 = 0; l2 < 3; ++l2) {
    h(6 + l2, 0 + l2) = omega;  // |r l2><0 l2|
    h(0 + l2, 6 + l2) = omega;
    h(6 + l2, 3 + l2) = omega;  // |r l2><1 l2|
    h(3 + l2, 6 + l2) = omega;
  }
  h(irr, irr) = delta;
  return h;
}

}  // namespace

TEST_CASE("h_epr with zero drive and zero shift is the zero operator") {
  CHECK(model::h_epr(SystemSpec::uniform(0.0, 0.0, 0.0)).matrix().norm() == 0.0);
}

TEST_CASE("h_epr blockade matrix element equals delta_r") {
  for (double delta : {-3.0, 0.5, 17.0}) {
    auto h = model::h_epr(SystemSpec::uniform(1.3, delta, 0.0));
    CHECK(h.matrix()(irr, irr).real() == doctest::Approx(delta).epsilon(1e-15));
    CHECK(h.matrix()(ir0, i00).real() == doctest::Approx(1.3).epsilon(1e-15));
  }
}

TEST_CASE("h_epr matches the hand-assembled oracle") {
  auto h = model::h_epr(SystemSpec::uniform(1.0, 10.0, 0.0));
  CHECK((h.matrix() - h_epr_oracle(1.0, 10.0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("h_epr_effective drives |00> to the EPR state at t1") {
  double omega = 2.0;
  auto h = model::h_epr_effective(SystemSpec::uniform(omega, 100.0 * omega, 0.0));
  double t1 = M_PI / (2.0 * std::sqrt(2.0) * omega);
  PureState out =
      dynamics::propagate_unitary(h, PureState::basis(3, {LevelLabel::g0, LevelLabel::g0}), t1);
  Vector epr = Vector::Zero(9);
  epr(i0r) = epr(ir0) = 1.0 / std::sqrt(2.0);
  // equal up to a global phase
  CHECK(std::norm(epr.dot(out.amplitudes())) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("h_epr_effective vanishes with the drive off") {
  CHECK(model::h_epr_effective(SystemSpec::uniform(0.0, 5.0, 0.0)).matrix().norm() == 0.0);
}

TEST_CASE("h_epr_effective matches the full model at strong blockade") {
  // propagate both for small t at delta/omega = 100 and compare on the
  // <= 1 excitation subspace
  double omega = 1.0, delta = 100.0;
  auto spec = SystemSpec::uniform(omega, delta, 0.0);
  dynamics::HermitianPropagator full(model::h_epr(spec));
  dynamics::HermitianPropagator eff(model::h_epr_effective(spec));
  PureState psi0 = PureState::basis(3, {LevelLabel::g0, LevelLabel::g0});
  for (double t : {0.05, 0.1, 0.2}) {
    Vector f = full.apply(psi0, t).amplitudes();
    Vector e = eff.apply(psi0, t).amplitudes();
    f(irr) = 0.0;  // project out the doubly excited component
    CHECK((f - e).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("h_gate drives only atom 1") {
  SystemSpec spec;
  spec.omega_0r = 0.8;
  spec.omega_1r = 1.7;
  spec.delta_r = 4.0;
  auto h = model::h_gate(spec);
  CHECK(h.matrix()(ir0, i00).real() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(h.matrix()(ir0, i10).real() == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(std::abs(h.matrix()(i0r, i00)) == 0.0);  // atom 2 undriven
  CHECK(h.matrix()(irr, irr).real() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("h_gate with zero spec is zero") {
  CHECK(model::h_gate(SystemSpec::uniform(0.0, 0.0, 0.0)).matrix().norm() == 0.0);
}

TEST_CASE("h_gate matches the hand-assembled oracle") {
  auto h = model::h_gate(SystemSpec::uniform(1.0, 5.0, 0.0));
  CHECK((h.matrix() - h_gate_oracle(1.0, 5.0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("all Hamiltonians are Hermitian for random specs") {
  auto gen = oracles::rng(41);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto spec = SystemSpec::uniform(uni(gen), uni(gen) - 5.0, 0.0);
    for (const auto& h : {model::h_epr(spec), model::h_epr_effective(spec), model::h_gate(spec)}) {
      CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("with delta_r = 0 the gate leaves the atom-2 reduced state invariant") {
  auto spec = SystemSpec::uniform(1.0, 0.0, 0.0);
  dynamics::HermitianPropagator prop(model::h_gate(spec));
  auto gen = oracles::rng(4242);
  for (int rep = 0; rep < 5; ++rep) {
    PureState q1 = oracles::random_pure(1, 3, gen);
    PureState q2 = oracles::random_pure(1, 3, gen);
    PureState psi0 = tensor(q1, q2);
    auto before = partial_trace(qcore::DensityOperator::from_pure(psi0), {1});
    for (double t : {0.3, 1.1}) {
      auto after = partial_trace(qcore::DensityOperator::from_pure(prop.apply(psi0, t)), {1});
      CHECK((after.matrix() - before.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("decay channels for the EPR stage") {
  auto spec = SystemSpec::uniform(1.0, 10.0, 0.123);
  auto channels = model::decay_channels(spec, 2, {0, 1}, {DecayTarget::to_g0});
  REQUIRE(channels.size() == 2);
  for (const auto& c : channels) CHECK(c.rate == doctest::Approx(0.123).epsilon(1e-15));
  // first channel acts on atom 0: |0..><r..|
  CHECK(channels[0].op.matrix()(i00, ir0).real() == 1.0);
  CHECK(channels[1].op.matrix()(i00, i0r).real() == 1.0);
}

TEST_CASE("decay channels for the gate stage") {
  SystemSpec spec = SystemSpec::uniform(1.0, 10.0, 0.0);
  spec.gamma_0r = 0.01;
  spec.gamma_1r = 0.02;
  auto channels = model::decay_channels(spec, 2, {0, 1}, {DecayTarget::to_g0, DecayTarget::to_g1});
  REQUIRE(channels.size() == 4);
  CHECK(channels[0].rate == doctest::Approx(0.01));
  CHECK(channels[1].rate == doctest::Approx(0.02));
}

TEST_CASE("zero decay rate gives channels whose dissipator vanishes") {
  auto spec = SystemSpec::uniform(1.0, 0.0, 0.0);
  auto channels = model::decay_channels(spec, 2, {0, 1}, {DecayTarget::to_g0});
  for (const auto& c : channels) CHECK(c.rate == 0.0);
}

TEST_CASE("decay channels reject atoms outside the register") {
  auto spec = SystemSpec::uniform(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(model::decay_channels(spec, 2, {2}, {DecayTarget::to_g0}),
                  std::invalid_argument);
}

TEST_CASE("scattering rate arithmetic") {
  IntermediateStateSpec ispec;
  ispec.gamma_p = 2.0 * M_PI * 3e6;
  ispec.delta_p = 2.0 * M_PI * 1e9;
  ispec.omega_laser = 2.0 * M_PI * 50e6;
  // gamma_sc = 2pi*3e6 * (0.05)^2 = 2pi*7.5e3 per beam
  CHECK(model::scattering_rate(ispec) == doctest::Approx(2.0 * M_PI * 7.5e3).epsilon(1e-12));
}

TEST_CASE("scattering rates vanish with gamma_p = 0") {
  IntermediateStateSpec ispec;
  ispec.gamma_p = 0.0;
  ispec.delta_p = 1.0;
  ispec.omega_laser = 1.0;
  auto channels = model::scattering_channels(ispec, 2, {{0, LevelLabel::g0}});
  for (const auto& c : channels) CHECK(c.rate == 0.0);
}

TEST_CASE("doubling the detuning quarters the scattering rate") {
  IntermediateStateSpec a;
  a.gamma_p = 1.0;
  a.delta_p = 2.0;
  a.omega_laser = 1.0;
  IntermediateStateSpec b = a;
  b.delta_p = 4.0;
  CHECK(model::scattering_rate(a) ==
        doctest::Approx(4.0 * model::scattering_rate(b)).epsilon(1e-15));
}

TEST_CASE("scattering channels carry a dephasing and a decay operator per driven state") {
  IntermediateStateSpec ispec;
  ispec.gamma_p = 1.0;
  ispec.delta_p = 10.0;
  ispec.omega_laser = 1.0;
  auto channels = model::scattering_channels(ispec, 1, {{0, LevelLabel::g1}});
  REQUIRE(channels.size() == 2);
  CHECK(channels[0].op.matrix()(1, 1).real() == 1.0);  // |1><1|
  CHECK(channels[1].op.matrix()(1, 2).real() == 1.0);  // |1><r|
  CHECK(channels[0].rate == doctest::Approx(2.0 * model::scattering_rate(ispec)));
}

TEST_CASE("zero detuning is rejected") {
  IntermediateStateSpec ispec;
  ispec.gamma_p = 1.0;
  ispec.delta_p = 0.0;
  ispec.omega_laser = 1.0;
  CHECK_THROWS_AS(model::scattering_rate(ispec), std::invalid_argument);
}

TEST_CASE("spec validation rejects negative rates") {
  SystemSpec spec;
  spec.gamma_0r = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
