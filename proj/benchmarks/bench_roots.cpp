#include <benchmark/benchmark.h>

#include "psg/polynomial.hpp"
#include "psg/rng.hpp"

using namespace psg;

namespace {

Polynomial random_poly(Rng& rng, int degree) {
    std::vector<cpx> c;
    for (int k = 0; k <= degree; ++k)
        c.push_back(cpx(2 * rng.next_double() - 1, 2 * rng.next_double() - 1));
    if (std::abs(c.back()) < 0.1) c.back() += cpx(1, 0);
    return Polynomial(c);
}

}  // namespace

static void BM_RootsQuadratic(benchmark::State& state) {
    Rng rng(1);
    Polynomial p = random_poly(rng, 2);
    cpx w(0.3, -0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(poly_roots(p - w));
        w += cpx(1e-9, 0);
    }
}
BENCHMARK(BM_RootsQuadratic);

static void BM_RootsShiftedMonomial(benchmark::State& state) {
    Polynomial p = Polynomial::monomial_shifted(cpx(0.25, 0.1), cpx(0.1, 0), 5, cpx(0.1, 0));
    cpx w(0.3, -0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(poly_roots(p - w));
        w += cpx(1e-9, 0);
    }
}
BENCHMARK(BM_RootsShiftedMonomial);

static void BM_RootsAberth(benchmark::State& state) {
    Rng rng(2);
    Polynomial p = random_poly(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(poly_roots(p));
    }
}
BENCHMARK(BM_RootsAberth)->Arg(4)->Arg(8)->Arg(16);
