// Reference clustering implementations for tests: a quadratic-scan DBSCAN
// written straight from the classic description, and an all-pairs k-distance
// computation. Independent of the library's index structures and traversal.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Labels: 0 noise, 1..k in discovery order. Closed eps-ball, min_pts counts
/// the query point, border ties to the first discovering cluster.
std::vector<int> dbscan_reference(const Eigen::MatrixXd& pts, double eps, int min_pts);

/// Distance of each point to its k-th nearest neighbor (self excluded),
/// sorted descending, via full per-point distance sorts.
std::vector<double> kdist_reference(const Eigen::MatrixXd& pts, int k);

}  // namespace oracle
