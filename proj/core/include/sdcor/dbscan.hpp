#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/common.hpp"

namespace sdcor {

/// min_pts counts the query point itself; the eps-ball is closed.
struct DbscanParams {
    double eps = 0.0;
    int min_pts = 0;
};

/// assignments[i] is a 1..k cluster id, or 0 for noise. Ids are contiguous in
/// order of cluster discovery; k = 0 means all noise.
struct Partition {
    std::vector<int> assignments;
    int k = 0;
};

/// Classic DBSCAN. Deterministic for a fixed input order: clusters are seeded
/// in index order and border ties go to the first cluster that reaches the
/// point. A uniform grid accelerates neighbor queries for p <= 3; its output
/// is identical to the quadratic scan.
Partition dbscan(const Eigen::MatrixXd& points, const DbscanParams& params);

/// True iff DBSCAN finds exactly one cluster; noise is permitted and ignored.
bool coherence_check(const Eigen::MatrixXd& points, const DbscanParams& params);

}  // namespace sdcor
