#include "genmetrics/metrics.hpp"
#include "genmetrics/synthlab.hpp"

#include <benchmark/benchmark.h>

namespace gm = genmetrics;

namespace {

gm::EmbeddingSet make_set(gm::Index n, gm::Index dim, std::uint64_t seed) {
    return gm::sample_gaussian({n, dim, 0.0, 1.0, seed});
}

void BM_PairwiseBlock(benchmark::State& state) {
    const gm::Index n = state.range(0);
    const auto A = make_set(1024, 64, 1);
    const auto B = make_set(n, 64, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gm::pairwise_block(A, 0, A.n(), B));
    }
    state.SetItemsProcessed(state.iterations() * 1024 * n);
}
BENCHMARK(BM_PairwiseBlock)->Arg(2000)->Arg(10000);

void BM_KnnRadii(benchmark::State& state) {
    const gm::Index n = state.range(0);
    const auto X = make_set(n, 64, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gm::knn_radii(X, 4));
    }
}
BENCHMARK(BM_KnnRadii)->Arg(2000)->Arg(5000);

void BM_PPrecision(benchmark::State& state) {
    const gm::Index n = state.range(0);
    const auto X = make_set(n, 64, 4);
    const auto Y = make_set(n, 64, 5);
    const auto cfg = gm::MetricConfig::defaults(gm::MetricFamily::pppr);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gm::p_precision(X, Y, cfg));
    }
}
BENCHMARK(BM_PPrecision)->Arg(2000)->Arg(5000);

} // namespace

BENCHMARK_MAIN();
