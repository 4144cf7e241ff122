// Microbenchmarks for the hot paths: distance kernels, exact search, LID
// estimation, index construction and search.
#include <benchmark/benchmark.h>

#include <random>

#include "hnswlab/dimest.hpp"
#include "hnswlab/hnsw.hpp"
#include "hnswlab/knn.hpp"
#include "hnswlab/synth.hpp"

using namespace hnswlab;

namespace {

Dataset gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    return synth::generate(synth::SynthSpec{d, d, n, seed});
}

void BM_Distance(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto metric = static_cast<Metric>(state.range(1));
    const auto data = gaussian(2, d, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance(data[0], data[1], metric));
    }
    state.SetItemsProcessed(state.iterations());
    state.SetLabel(std::string(to_string(metric)));
}
BENCHMARK(BM_Distance)->ArgsProduct({{32, 256, 1024}, {0, 1, 2}});

void BM_ExactSearch(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto data = gaussian(n, 256, 2);
    const auto query = gaussian(1, 256, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(knn::exact_search(data, query[0], 10, Metric::L2));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ExactSearch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_LidMle(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::vector<double> t(100);
    for (double& x : t) x = u(rng);
    std::sort(t.begin(), t.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(dimest::lid_mle(t));
    }
}
BENCHMARK(BM_LidMle);

void BM_LidProfile(benchmark::State& state) {
    const auto data = gaussian(static_cast<std::size_t>(state.range(0)), 64, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dimest::lid_profile(data, 100, Metric::L2, 1));
    }
}
BENCHMARK(BM_LidProfile)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Build(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto data = gaussian(n, 64, 6);
    const auto order = orders::order_identity(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hnsw::build(data, order, hnsw::HnswParams{}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Build)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
    const auto ef = static_cast<std::size_t>(state.range(0));
    const auto data = gaussian(10000, 64, 7);
    const auto queries = gaussian(256, 64, 8);
    const auto index = hnsw::build(data, orders::order_identity(data.size()), hnsw::HnswParams{});
    VectorId q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.search(queries[q], 10, ef));
        q = (q + 1) % static_cast<VectorId>(queries.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Search)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
