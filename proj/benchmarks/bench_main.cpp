#include <benchmark/benchmark.h>

#include <random>

#include "mathds/elliptic.hpp"
#include "mathds/kronecker.hpp"
#include "mathds/kronecker_batch.hpp"
#include "mathds/loadings.hpp"
#include "mathds/mlkit.hpp"

using namespace mathds;

static void BM_CharacterTable(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(character_table(n));
}
BENCHMARK(BM_CharacterTable)->Arg(10)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

static void BM_KroneckerCube(benchmark::State& state) {
    const auto table = character_table(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compute_kronecker_cube(table, 1));
    state.counters["unordered_triples"] = static_cast<double>(compute_kronecker_cube(table, 1).unordered_count());
}
BENCHMARK(BM_KroneckerCube)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_KernelSingle(benchmark::State& state) {
    const auto table = character_table(16);
    const KroneckerKernel kernel(table);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
    for (auto _ : state) benchmark::DoNotOptimize(kernel(pick(rng), pick(rng), pick(rng)));
}
BENCHMARK(BM_KernelSingle);

static void BM_BStarSearch(benchmark::State& state) {
    const auto table = character_table(static_cast<int>(state.range(0)));
    const auto lb = loadings(table.partitions(), LoadingKind::b);
    for (auto _ : state) benchmark::DoNotOptimize(b_star_search(table, lb, 1));
}
BENCHMARK(BM_BStarSearch)->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Knn(benchmark::State& state) {
    const auto table = character_table(12);
    const auto batch = batch_kronecker(table, BatchMode::sampled(static_cast<std::size_t>(state.range(0)), 3), 1);
    const auto cloud = point_cloud_from_triples(batch.records, 12);
    const auto [train, test] = train_test_split(cloud, 0.8, 3);
    for (auto _ : state) benchmark::DoNotOptimize(knn_classify(train, test.x, 1, 1));
}
BENCHMARK(BM_Knn)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_PointCount(benchmark::State& state) {
    CurveRecord curve;
    curve.a = {1, 0, 1, 4, -6};
    const auto primes = first_primes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        for (auto p : primes)
            if (p != 2 && p != 7) benchmark::DoNotOptimize(count_points_mod_p(curve, p));
}
BENCHMARK(BM_PointCount)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
