#include "sdcor/validity.hpp"

#include <cmath>
#include <limits>

#include "sdcor/stats.hpp"

namespace sdcor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd centroids_of(const Eigen::MatrixXd& pts, const Groups& groups) {
    Eigen::MatrixXd cents(static_cast<Eigen::Index>(groups.size()), pts.cols());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(pts.cols());
        for (int i : groups[g]) sum += pts.row(i);
        cents.row(static_cast<Eigen::Index>(g)) = sum / static_cast<double>(groups[g].size());
    }
    return cents;
}

void check_groups(const Groups& groups) {
    if (groups.size() < 2)
        throw InputError("validity index needs at least two groups");
    for (const auto& g : groups)
        if (g.empty()) throw InputError("validity index: empty group");
}

}  // namespace

double davies_bouldin(const Eigen::MatrixXd& points, const Groups& groups) {
    check_groups(groups);
    const std::size_t k = groups.size();
    const Eigen::MatrixXd cents = centroids_of(points, groups);
    std::vector<double> spread(k, 0.0);
    for (std::size_t g = 0; g < k; ++g) {
        double sum = 0.0;
        for (int i : groups[g])
            sum += (points.row(i) - cents.row(static_cast<Eigen::Index>(g))).norm();
        spread[g] = sum / static_cast<double>(groups[g].size());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double sep = (cents.row(static_cast<Eigen::Index>(i)) -
                                cents.row(static_cast<Eigen::Index>(j)))
                                   .norm();
            const double r = sep > 0.0 ? (spread[i] + spread[j]) / sep
                                       : std::numeric_limits<double>::max();
            worst = std::max(worst, r);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double cs_index(const Eigen::MatrixXd& points, const Groups& groups) {
    check_groups(groups);
    const std::size_t k = groups.size();
    const Eigen::MatrixXd cents = centroids_of(points, groups);
    double numerator = 0.0;
    for (const auto& g : groups) {
        double sum = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) {
            double far = 0.0;
            for (std::size_t b = 0; b < g.size(); ++b)
                far = std::max(far, (points.row(g[a]) - points.row(g[b])).norm());
            sum += far;
        }
        numerator += sum / static_cast<double>(g.size());
    }
    double denominator = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double nearest = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            nearest = std::min(nearest, (cents.row(static_cast<Eigen::Index>(i)) -
                                         cents.row(static_cast<Eigen::Index>(j)))
                                            .norm());
        }
        denominator += nearest;
    }
    if (!(denominator > 0.0)) return std::numeric_limits<double>::max();
    return numerator / denominator;
}

double fitness(const Eigen::MatrixXd& sample, const DbscanParams& params) {
    const Partition part = dbscan(sample, params);
    const auto s = static_cast<int>(sample.rows());

    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(part.k));
    std::vector<int> noise;
    for (int i = 0; i < s; ++i) {
        const int a = part.assignments[static_cast<std::size_t>(i)];
        if (a == 0)
            noise.push_back(i);
        else
            clusters[static_cast<std::size_t>(a - 1)].push_back(i);
    }

    if (part.k == 0) return kInf;       // every point is noise
    if (noise.empty()) return kInf;     // no outliers separated
    for (const auto& members : clusters) {
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(members.size()), sample.cols());
        for (std::size_t r = 0; r < members.size(); ++r)
            rows.row(static_cast<Eigen::Index>(r)) = sample.row(members[r]);
        if (is_singular(SuffStats::from_rows(rows))) return kInf;  // singular cluster
    }

    Groups groups = clusters;
    groups.push_back(noise);  // noise counts as one cluster in both indices
    const double ratio = static_cast<double>(noise.size()) / static_cast<double>(s);
    return davies_bouldin(sample, groups) + cs_index(sample, groups) + ratio;
}

}  // namespace sdcor
