#include <benchmark/benchmark.h>

#include <dsreg/inference.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/tuning.hpp>

using namespace dsreg;

static void BM_MRow(benchmark::State& state)
{
    DesignSpec ds;
    ds.n = 400;
    ds.d = state.range(0);
    ds.b = 5;
    ds.seed = 3;
    const auto des = generate_design(ds);
    const Matrix S = sample_covariance(des.X);
    const double lambda = default_lambdas(1.0, 400, ds.d, 5, 3, 2).lambda;
    const auto th = inference_thresholds(lambda, 400, 1.0, 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_M_row(S, des.partition, 0, th.alpha, th.gamma).data());
}
BENCHMARK(BM_MRow)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
