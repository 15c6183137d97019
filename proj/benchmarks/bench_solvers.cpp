#include <benchmark/benchmark.h>

#include <cmath>

#include <dsreg/simgen.hpp>
#include <dsreg/solvers.hpp>
#include <dsreg/tuning.hpp>

using namespace dsreg;

namespace {

Dataset draw(Index n, double sigma)
{
    DesignSpec ds;
    ds.n = n;
    ds.d = 60;
    ds.b = 20;
    ds.seed = 11;
    return simulate(ds, SignalSpec{}, sigma, 12);
}

} // namespace

// Penalized fit at the theory lambda on 60 groups of 20.
static void BM_Apg(benchmark::State& state)
{
    const Dataset d = draw(state.range(0), 0.1);
    const Lambdas l = default_lambdas(0.1, d.n(), 60, 20, 5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_sgl(d, l.lambda, l.lambda_g).objective);
}
BENCHMARK(BM_Apg)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

// Equality-constrained fit, below and above the recovery threshold.
static void BM_Admm(benchmark::State& state)
{
    const Dataset d = draw(state.range(0), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_noiseless(d, std::sqrt(5.0)).objective);
}
BENCHMARK(BM_Admm)->Arg(20)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_L1Min(benchmark::State& state)
{
    const Dataset d = draw(state.range(0), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_l1_min(d).objective);
}
BENCHMARK(BM_L1Min)->Arg(20)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
