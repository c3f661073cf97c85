#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/dbscan.hpp"

namespace sdcor {

struct KmeansResult {
    Partition partition;
    double sse = 0.0;
    std::vector<double> sse_history;  // per Lloyd iteration of the winning restart
};

/// Lloyd iterations from k-means++ seeding, 3 restarts, 100 iterations each;
/// returns the restart with minimal within-cluster sum of squares. Empty
/// clusters are re-seeded from the point farthest from its centroid.
/// Deterministic for a fixed seed.
KmeansResult kmeans_detailed(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

Partition kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

}  // namespace sdcor
