#include "nldecay/initial_data.hpp"
#include "nldecay/integrator.hpp"
#include "nldecay/scole_model.hpp"
#include "nldecay/spectral.hpp"
#include "nldecay/wave_model.hpp"

#include <benchmark/benchmark.h>

using namespace nldecay;

namespace {

DampedSystem wave(int modes) {
    WaveModelConfig cfg;
    cfg.modes = modes;
    return build_wave_modal(cfg);
}

void BM_StrangStepWave(benchmark::State& state) {
    const DampedSystem sys = wave(static_cast<int>(state.range(0)));
    const StrangStepper stepper(sys, Nonlinearity::tanh_profile(), 1e-2, 1e-12);
    Eigen::VectorXd z = stepper.to_pairs(smooth_state(sys, 1));
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(z));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StrangStepWave)->Arg(64)->Arg(128)->Arg(256);

void BM_StrangStepScole(benchmark::State& state) {
    ScoleConfig cfg;
    cfg.elements = static_cast<int>(state.range(0));
    const DampedSystem sys = build_scole_fem(cfg);
    const StrangStepper stepper(sys, Nonlinearity::tanh_profile(), 1e-5, 1e-12);
    Eigen::VectorXd z = stepper.to_pairs(smooth_state(sys, 1));
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(z));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StrangStepScole)->Arg(16)->Arg(64);

void BM_ResolventWoodbury(benchmark::State& state) {
    const DampedSystem sys = wave(static_cast<int>(state.range(0)));
    double s = 7.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            resolvent_norm(sys, 1.0, s, ResolventMethod::Woodbury));
        s += 1e-3;  // defeat any incidental caching
    }
}
BENCHMARK(BM_ResolventWoodbury)->Arg(64)->Arg(256);

void BM_ResolventDense(benchmark::State& state) {
    const DampedSystem sys = wave(static_cast<int>(state.range(0)));
    double s = 7.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(resolvent_norm(sys, 1.0, s, ResolventMethod::Dense));
        s += 1e-3;
    }
}
BENCHMARK(BM_ResolventDense)->Arg(64)->Arg(256);

void BM_ObservabilityPencil(benchmark::State& state) {
    const DampedSystem sys = wave(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(observability_constant(sys, 3.0, 1.0).c_tau);
}
BENCHMARK(BM_ObservabilityPencil)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
