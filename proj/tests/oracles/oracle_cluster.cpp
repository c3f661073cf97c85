#include "oracles/oracle_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

std::vector<int> dbscan_reference(const Eigen::MatrixXd& pts, double eps, int min_pts) {
    const auto n = static_cast<int>(pts.rows());
    // Full boolean adjacency under the closed eps-ball.
    std::vector<std::vector<bool>> close(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            close[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                (pts.row(i) - pts.row(j)).squaredNorm() <= eps * eps;

    auto region = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (close[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                out.push_back(j);
        return out;
    };

    std::vector<int> label(static_cast<std::size_t>(n), 0);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        seen[static_cast<std::size_t>(i)] = true;
        std::vector<int> neighbors = region(i);
        if (static_cast<int>(neighbors.size()) < min_pts) continue;
        ++cluster;
        label[static_cast<std::size_t>(i)] = cluster;
        for (std::size_t at = 0; at < neighbors.size(); ++at) {
            const int j = neighbors[at];
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                std::vector<int> more = region(j);
                if (static_cast<int>(more.size()) >= min_pts)
                    neighbors.insert(neighbors.end(), more.begin(), more.end());
            }
            if (label[static_cast<std::size_t>(j)] == 0)
                label[static_cast<std::size_t>(j)] = cluster;
        }
    }
    return label;
}

std::vector<double> kdist_reference(const Eigen::MatrixXd& pts, int k) {
    const auto n = static_cast<int>(pts.rows());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> dists;
        dists.reserve(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.push_back((pts.row(i) - pts.row(j)).norm());
        }
        std::sort(dists.begin(), dists.end());
        out.push_back(dists[static_cast<std::size_t>(k - 1)]);
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

}  // namespace oracle
