#include <benchmark/benchmark.h>

#include "psg/families.hpp"
#include "psg/julia.hpp"
#include "psg/randomdyn.hpp"

using namespace psg;

static void BM_BackwardOrbit(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(backward_orbit(f, n, 256, seed++).count());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BackwardOrbit)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_TInfinityPoint(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    EscapeConfig cfg;
    cfg.probabilities = {0.5, 0.5};
    cfg.escape_radius = 2.0;
    cfg.max_iter = 200;
    cfg.trials = 1000;
    cfg.seed = 7;
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_infinity(f, cfg, cpx(0.7, 0.1), stream++).value);
    }
}
BENCHMARK(BM_TInfinityPoint)->Unit(benchmark::kMicrosecond);

static void BM_Rasterize(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    PointCloud cloud = backward_orbit(f, 200000, 256, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize(cloud, cpx(-1.1, -1.1), cpx(1.1, 1.1), 1024, 1024).occupied_cells());
    }
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);
