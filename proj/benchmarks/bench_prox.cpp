#include <benchmark/benchmark.h>

#include <random>

#include <dsreg/prox.hpp>

using namespace dsreg;

static void BM_SparseGroupProx(benchmark::State& state)
{
    const Index d = state.range(0);
    const Index b = state.range(1);
    const GroupPartition part(std::vector<Index>(static_cast<std::size_t>(d), b));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Vector v(d * b);
    for (auto& x : v) x = g(rng);
    Vector w(v.size());
    for (auto _ : state) {
        w = v;
        sparse_group_prox_inplace(w, part, {0.5, 1.0});
        benchmark::DoNotOptimize(w.data());
    }
    state.SetItemsProcessed(state.iterations() * v.size());
}
BENCHMARK(BM_SparseGroupProx)->Args({60, 20})->Args({500, 20})->Args({1000, 1});

BENCHMARK_MAIN();
