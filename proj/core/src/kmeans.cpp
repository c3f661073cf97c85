#include "sdcor/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace sdcor {

namespace {

constexpr int kRestarts = 3;
constexpr int kMaxIters = 100;

// Weighted pick by squared distance to the nearest chosen center.
int pick_weighted(const Eigen::VectorXd& weights, std::mt19937_64& rng) {
    const double total = weights.sum();
    if (!(total > 0.0)) {
        for (Eigen::Index i = 0; i < weights.size(); ++i)
            if (weights(i) >= 0.0) return static_cast<int>(i);
        return 0;
    }
    std::uniform_real_distribution<double> unif(0.0, total);
    const double r = unif(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        acc += weights(i);
        if (r <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& pts, int k, std::mt19937_64& rng) {
    const auto n = static_cast<int>(pts.rows());
    Eigen::MatrixXd centers(k, pts.cols());
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.row(0) = pts.row(first(rng));
    Eigen::VectorXd d2 = (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const int pick = pick_weighted(d2, rng);
        centers.row(c) = pts.row(pick);
        d2 = d2.cwiseMin((pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

struct LloydRun {
    std::vector<int> assign;  // 0-based center index
    double sse = 0.0;
    std::vector<double> history;
};

LloydRun lloyd(const Eigen::MatrixXd& pts, Eigen::MatrixXd centers) {
    const auto n = static_cast<int>(pts.rows());
    const int k = static_cast<int>(centers.rows());
    LloydRun run;
    run.assign.assign(static_cast<std::size_t>(n), 0);

    for (int iter = 0; iter < kMaxIters; ++iter) {
        bool changed = false;
        double sse = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = (pts.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (pts.row(i) - centers.row(c)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (run.assign[static_cast<std::size_t>(i)] != best) {
                run.assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
            sse += bd;
        }
        run.sse = sse;
        run.history.push_back(sse);
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, pts.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            sums.row(run.assign[static_cast<std::size_t>(i)]) += pts.row(i);
            ++counts[static_cast<std::size_t>(run.assign[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
            } else {
                // Re-seed an empty cluster from the farthest point.
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d =
                        (pts.row(i) - centers.row(run.assign[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centers.row(c) = pts.row(far);
            }
        }
    }
    return run;
}

}  // namespace

KmeansResult kmeans_detailed(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    const auto n = static_cast<int>(points.rows());
    if (k < 1) throw InputError("kmeans: k must be >= 1");
    if (k > n) throw InputError("kmeans: k exceeds the number of points");

    LloydRun best;
    best.sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kRestarts; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        LloydRun run = lloyd(points, kmeanspp_centers(points, k, rng));
        for (std::size_t i = 1; i < run.history.size(); ++i) {
            if (run.history[i] > run.history[i - 1] * (1.0 + 1e-12) + 1e-12)
                throw InvariantError("kmeans: SSE increased across Lloyd iterations");
        }
        if (run.sse < best.sse) best = std::move(run);
    }

    // Remap to contiguous 1..k over nonempty clusters, by first appearance.
    std::vector<int> remap(static_cast<std::size_t>(k), 0);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int& slot = remap[static_cast<std::size_t>(best.assign[static_cast<std::size_t>(i)])];
        if (slot == 0) slot = ++next;
    }
    KmeansResult result;
    result.partition.assignments.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        result.partition.assignments[static_cast<std::size_t>(i)] =
            remap[static_cast<std::size_t>(best.assign[static_cast<std::size_t>(i)])];
    result.partition.k = next;
    result.sse = best.sse;
    result.sse_history = std::move(best.history);
    return result;
}

Partition kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    return kmeans_detailed(points, k, seed).partition;
}

}  // namespace sdcor
