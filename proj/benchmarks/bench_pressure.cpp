#include <benchmark/benchmark.h>

#include "psg/families.hpp"
#include "psg/thermo.hpp"

using namespace psg;

static void BM_PreimageTreeBuild(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    int level = static_cast<int>(state.range(0));
    cpx z0 = pressure_base_point(f);
    for (auto _ : state) {
        PreimageTree tree(f, z0, level);
        benchmark::DoNotOptimize(tree.term_count());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PreimageTreeBuild)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_PressureEval(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    PreimageTree tree(f, pressure_base_point(f), 8);
    double t = 1.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.pressure(t));
        t += 1e-9;  // defeat caching
    }
}
BENCHMARK(BM_PressureEval)->Unit(benchmark::kMillisecond);

static void BM_BowenSolve(benchmark::State& state) {
    MultiMap f = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0));
    int level = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bowen_parameter(f, level, 1e-8).delta);
    }
}
BENCHMARK(BM_BowenSolve)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
