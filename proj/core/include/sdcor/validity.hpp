#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sdcor/dbscan.hpp"

namespace sdcor {

/// Index groups of one clustering outcome; every group must be nonempty.
using Groups = std::vector<std::vector<int>>;

/// Davies-Bouldin index with Euclidean centroids: mean over clusters of the
/// worst (S_i + S_j) / d(m_i, m_j) pairing.
double davies_bouldin(const Eigen::MatrixXd& points, const Groups& groups);

/// CS index: mean-of-max intra-cluster distances over summed nearest
/// inter-centroid distances.
double cs_index(const Eigen::MatrixXd& points, const Groups& groups);

/// DBSCAN-parameter cost on a sample: Davies-Bouldin + CS + noise ratio, with
/// DBSCAN noise treated as one extra cluster in both indices. Infinite when
/// (a) everything is noise, (b) nothing is noise, or (c) any discovered
/// cluster is singular.
double fitness(const Eigen::MatrixXd& sample, const DbscanParams& params);

}  // namespace sdcor
