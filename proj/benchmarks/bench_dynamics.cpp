#include <benchmark/benchmark.h>

#include "rydsim/experiments.hpp"
#include "rydsim/protocol.hpp"

using namespace rydsim;
using model::DecayTarget;
using model::SystemSpec;
using qcore::DensityOperator;
using qcore::LevelLabel;
using qcore::PureState;

namespace {

void BM_EprFirstPeak(benchmark::State& state) {
  SystemSpec spec = SystemSpec::uniform(1.0, static_cast<double>(state.range(0)), 1e-3);
  spec.gamma_1r = 0.0;
  auto h = model::h_epr(spec);
  auto channels = model::decay_channels(spec, 2, {0, 1}, {DecayTarget::to_g0});
  auto rho0 = DensityOperator::from_pure(PureState::basis(3, {LevelLabel::g0, LevelLabel::g0}));
  qcore::Vector v = qcore::Vector::Zero(9);
  v(2) = v(6) = 1.0 / std::sqrt(2.0);
  PureState probe(2, 3, v);
  for (auto _ : state) {
    auto peak = dynamics::propagate_to_first_peak(h, channels, rho0, probe, 2.0);
    benchmark::DoNotOptimize(peak.population);
  }
}
BENCHMARK(BM_EprFirstPeak)->Arg(5)->Arg(10)->Arg(20);

void BM_UnitaryPropagator(benchmark::State& state) {
  auto h = model::h_epr(SystemSpec::uniform(1.0, 10.0, 0.0));
  PureState psi0 = PureState::basis(3, {LevelLabel::g0, LevelLabel::g0});
  for (auto _ : state) {
    dynamics::HermitianPropagator prop(h);
    benchmark::DoNotOptimize(prop.apply(psi0, 1.0));
  }
}
BENCHMARK(BM_UnitaryPropagator);

void BM_GateFidelityPoint(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        experiments::gate_fidelity_point(static_cast<double>(state.range(0)), 0.01));
  }
}
BENCHMARK(BM_GateFidelityPoint)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_TeleportLindblad(benchmark::State& state) {
  auto spec = SystemSpec::uniform(2.0 * M_PI * 2.5e6, 2.0 * M_PI * 2.5e6 * 20.0,
                                  2.0 * M_PI * 2.5e6 * 1e-3);
  protocol::InputQubitSpec input{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  for (auto _ : state) {
    auto report = protocol::teleport(input, spec, protocol::Mode::lindblad);
    benchmark::DoNotOptimize(report.average_fidelity);
  }
}
BENCHMARK(BM_TeleportLindblad)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
