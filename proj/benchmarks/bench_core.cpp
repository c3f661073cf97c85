#include <benchmark/benchmark.h>

#include <random>

#include "sdcor/dbscan.hpp"
#include "sdcor/kdist.hpp"
#include "sdcor/pipeline.hpp"
#include "sdcor/stats.hpp"

namespace {

using namespace sdcor;

Eigen::MatrixXd random_rows(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd rows(n, p);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < p; ++d) rows(i, d) = normal(rng);
    return rows;
}

Eigen::MatrixXd two_blobs(int n, std::uint64_t seed) {
    Eigen::MatrixXd rows = random_rows(n, 2, seed);
    rows.bottomRows(n / 2).col(0).array() += 12.0;
    return rows;
}

void BM_SuffStatsInsert(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const Eigen::MatrixXd rows = random_rows(1024, p, 1);
    for (auto _ : state) {
        SuffStats stats(p);
        for (Eigen::Index i = 0; i < rows.rows(); ++i)
            stats.insert(rows.row(i).transpose());
        benchmark::DoNotOptimize(stats.ls.sum());
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SuffStatsInsert)->Arg(10)->Arg(30)->Arg(60);

void BM_DeriveBasis(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const SuffStats stats = SuffStats::from_rows(random_rows(4 * p, p, 2));
    for (auto _ : state) {
        const EigenBasis basis = derive_basis(stats, 1.0);
        benchmark::DoNotOptimize(basis.sqrt_vars(0));
    }
}
BENCHMARK(BM_DeriveBasis)->Arg(10)->Arg(30)->Arg(60);

void BM_MahalanobisBatch(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const SuffStats stats = SuffStats::from_rows(random_rows(4 * p, p, 3));
    const EigenBasis basis = derive_basis(stats, 1.0);
    const Eigen::MatrixXd queries = random_rows(4096, p, 4);
    for (auto _ : state) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < queries.rows(); ++i)
            acc += mahalanobis(queries.row(i).transpose(), basis);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_MahalanobisBatch)->Arg(10)->Arg(30);

void BM_Dbscan2d(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd pts = two_blobs(n, 5);
    const DbscanParams params{0.35, 5};
    for (auto _ : state) {
        const Partition part = dbscan(pts, params);
        benchmark::DoNotOptimize(part.k);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Dbscan2d)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_KdistGraph(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd pts = two_blobs(n, 6);
    for (auto _ : state) {
        const KDistGraph graph = kdist_graph(pts, 4);
        benchmark::DoNotOptimize(graph.values.front());
    }
}
BENCHMARK(BM_KdistGraph)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
