// Hot-path benchmarks: the Kummer series (the cost center of every
// transform call), one full transform evaluation, a COS strike batch, a
// single VIX option quadrature, and raw Monte Carlo throughput. Run with
// --benchmark_min_time=... for tighter numbers; defaults are fine for
// spotting regressions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "vol32/equity.hpp"
#include "vol32/models.hpp"
#include "vol32/montecarlo.hpp"
#include "vol32/special_functions.hpp"
#include "vol32/transforms.hpp"
#include "vol32/vix.hpp"

namespace {

using namespace vol32;

const ThreeHalvesParams kVixSet{22.84, 0.4669 * 0.4669, 8.56, -0.99,
                                0.2450 * 0.2450};
const ThreeHalvesParams kEqSet{30.84, 0.01, 50.56, -0.57, 0.00675684};
const MarketEnv kEqEnv{0.01, 1370.0};
const MarketEnv kVixEnv{0.01, 1.0};

JumpParams eq_jumps() { return complete_jump_params_from_mu(0.18, 0.39, -0.30); }

void BM_KummerSeries(benchmark::State& state) {
    const cplx a(0.0094, 0.0070), b(2.64, 0.245);
    const cplx z(-static_cast<double>(state.range(0)), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(kummer_m(a, b, z));
}
BENCHMARK(BM_KummerSeries)->Arg(1)->Arg(30)->Arg(300);

void BM_Transform(benchmark::State& state) {
    const JumpParams jp = eq_jumps();
    const double x0 = std::log(kEqEnv.s0);
    double u = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fl_transform_32j(cplx(u, 0.0), cplx(0.0, 0.0),
                                                  x0, kEqSet.v0, 0.0, 0.25,
                                                  kEqSet, jp, kEqEnv));
        u = u < 200.0 ? u + 1.0 : 1.0;  // sweep the integration range
    }
}
BENCHMARK(BM_Transform);

void BM_CosChain(benchmark::State& state) {
    const JumpParams jp = eq_jumps();
    std::vector<double> strikes;
    for (int i = 0; i < 21; ++i)
        strikes.push_back((0.8 + 0.02 * i) * kEqEnv.s0);
    for (auto _ : state)
        benchmark::DoNotOptimize(cos_price(strikes, OptionKind::call,
                                           9.0 / 365.0, kEqEnv, kEqSet, jp));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(strikes.size()));
}
BENCHMARK(BM_CosChain);

void BM_VixCall(benchmark::State& state) {
    const VIXSpec spec;
    const JumpParams none{};
    const double F = vix_future(kVixSet, none, kVixEnv, spec, 0.25, false);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            vix_call(kVixSet, none, kVixEnv, spec, 0.25, F, false));
}
BENCHMARK(BM_VixCall);

void BM_MonteCarlo(benchmark::State& state) {
    const JumpParams jp = eq_jumps();
    MCConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.seed = 7;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            simulate_32j(kEqSet, jp, kEqEnv, 0.25, cfg));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(cfg.n_paths));
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
