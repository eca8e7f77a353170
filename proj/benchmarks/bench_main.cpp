#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "chainlab/cooling.hpp"
#include "chainlab/coupling.hpp"
#include "chainlab/equilibrium.hpp"
#include "chainlab/modes.hpp"
#include "chainlab/spectrum.hpp"

using namespace chainlab;

namespace {

double mg_u0() {
    return u0_from_reference_frequency(builtin_species("Mg"), 2.0 * PhysicalConstants::pi * 1.0e6);
}

ChainSpec alternating_chain(int n) {
    std::vector<IonSpecies> ions;
    for (int i = 0; i < n; ++i) ions.push_back(builtin_species(i % 2 == 0 ? "Mg" : "In"));
    return ChainSpec(ions, mg_u0());
}

void BM_Equilibrium(benchmark::State& state) {
    const auto chain = alternating_chain(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_equilibrium(chain));
}
BENCHMARK(BM_Equilibrium)->Arg(3)->Arg(10)->Arg(32);

void BM_NormalModes(benchmark::State& state) {
    const auto chain = alternating_chain(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(normal_modes(chain));
}
BENCHMARK(BM_NormalModes)->Arg(3)->Arg(10)->Arg(32);

void BM_TwoIonSpectrum(benchmark::State& state) {
    const auto modes = normal_modes(alternating_chain(2));
    const auto ld = lamb_dicke_matrix(modes);
    const FockTruncation trunc({60, 30}, 1e-6);
    for (auto _ : state) {
        const auto thermal = thermal_state(modes, 5.0 * modes.frequencies[0], trunc);
        benchmark::DoNotOptimize(absorption_spectrum(ld, 0, thermal, trunc, 1e-6));
    }
}
BENCHMARK(BM_TwoIonSpectrum)->Unit(benchmark::kMillisecond);

void BM_ScatteringKernel(benchmark::State& state) {
    DegenerateCoolingConfig config;
    const int n1 = static_cast<int>(state.range(0));
    const FockTruncation trunc({n1, n1 / 2}, kMaxLeakage);
    const auto geometry = mg_in_pair_geometry(config.omega);
    const auto basis = build_motional_hamiltonian(config.omega, config.omega_ratio * config.omega, geometry, trunc, config.hamiltonian);
    const LaserParams laser{config.rabi_g, config.detuning, config.gamma};
    for (auto _ : state) benchmark::DoNotOptimize(scattering_rate_kernel(basis, config.eta, laser));
}
BENCHMARK(BM_ScatteringKernel)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_DegenerateCooling(benchmark::State& state) {
    DegenerateCoolingConfig config;
    config.truncation = FockTruncation({12, 6}, kMaxLeakage);
    config.initial_mean = {0.5, 0.25};
    config.t_final = 50.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_degenerate_cooling(config));
}
BENCHMARK(BM_DegenerateCooling)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
