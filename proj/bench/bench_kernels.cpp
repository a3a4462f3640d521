// Serial vs OpenMP: sliding-window excitation level and scenario sweeps.

#include <cmath>

#include <benchmark/benchmark.h>

#include "avgdrem/config.hpp"
#include "avgdrem/diagnostics.hpp"
#include "avgdrem/experiment.hpp"

namespace {

avgdrem::RegressorSamples sinusoid(double horizon) {
    avgdrem::RegressorSamples s;
    for (double t = 0.0; t <= horizon + 1e-9; t += 0.01) {
        s.t.push_back(t);
        s.phi.push_back({std::sin(t), std::exp(-0.01 * t), 1.0});
    }
    return s;
}

void BM_PeLevelSerial(benchmark::State& state) {
    const auto s = sinusoid(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(avgdrem::pe_level_serial(s, 6.283185307179586));
}

void BM_PeLevelParallel(benchmark::State& state) {
    const auto s = sinusoid(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(avgdrem::pe_level(s, 6.283185307179586));
}

std::vector<avgdrem::RunPlan> sweep_plans() {
    std::vector<avgdrem::RunPlan> plans;
    for (const char* name : {"scenario_a", "scenario_b"}) {
        auto spec = avgdrem::load_scenario(avgdrem::resolve_scenario(name));
        spec.horizon = 20.0;
        for (auto& p : avgdrem::plans_for(spec, avgdrem::LawSelection::both)) plans.push_back(p);
    }
    return plans;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto plans = sweep_plans();
    for (auto _ : state) benchmark::DoNotOptimize(avgdrem::run_sweep_serial(plans));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto plans = sweep_plans();
    for (auto _ : state) benchmark::DoNotOptimize(avgdrem::run_sweep(plans));
}

}  // namespace

BENCHMARK(BM_PeLevelSerial)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeLevelParallel)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
