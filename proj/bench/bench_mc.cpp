#include <benchmark/benchmark.h>

#include "recycle/eval.hpp"

using namespace recycle;

namespace {

const Policy& optimal_policy() {
    static const ModelParams params;
    static const Policy policy = make_policy(shoot_kstar(params, ShootConfig{}), params);
    return policy;
}

SimConfig bench_config() {
    SimConfig cfg;
    cfg.T = 20.0;
    cfg.dt = 0.002;
    return cfg;
}

void BM_SerialReference(benchmark::State& state) {
    const ModelParams params;
    const auto n_paths = state.range(0);
    for (auto _ : state) {
        const EvalReport r = monte_carlo_J_serial(optimal_policy(), params, bench_config(), n_paths, 1);
        benchmark::DoNotOptimize(r.j_mean);
    }
    state.SetItemsProcessed(state.iterations() * n_paths * bench_config().steps());
}

void BM_Parallel(benchmark::State& state) {
    const ModelParams params;
    const auto n_paths = state.range(0);
    EvalOptions options;
    options.threads = static_cast<int>(state.range(1));
    options.extend_horizon = false;
    for (auto _ : state) {
        const EvalReport r = monte_carlo_J(optimal_policy(), params, bench_config(), n_paths, 1, options);
        benchmark::DoNotOptimize(r.j_mean);
    }
    state.SetItemsProcessed(state.iterations() * n_paths * bench_config().steps());
}

void BM_Shooting(benchmark::State& state) {
    const ModelParams params;
    ShootConfig cfg;
    cfg.grid_n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(shoot_kstar(params, cfg).k_star);
}

}  // namespace

BENCHMARK(BM_SerialReference)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({64, 1})->Args({64, 2})->Args({64, 4})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Shooting)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
