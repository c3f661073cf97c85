#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/common.hpp"

namespace sdcor {

/// Distances from every point to its k-th nearest neighbor (query point
/// excluded), sorted in descending order.
struct KDistGraph {
    int k = 0;
    std::vector<double> values;
};

KDistGraph kdist_graph(const Eigen::MatrixXd& points, int k);

struct KneeResult {
    double eps = 0.0;
    std::size_t index = 0;
    /// Set when the max chord distance is under 1% of the curve range; the
    /// curve has no usable valley and a human override is advisable.
    bool low_confidence = false;
};

/// Max-curvature surrogate for the visual first-valley rule: the value whose
/// point lies farthest from the chord between the curve's endpoints, after
/// normalizing both axes to [0,1].
KneeResult detect_knee(const KDistGraph& graph);

/// Two-column CSV `rank,distance` for plotting and human override.
void write_kdist_csv(const KDistGraph& graph, const std::string& path);

}  // namespace sdcor
