#include "sdcor/kdist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sdcor {

KDistGraph kdist_graph(const Eigen::MatrixXd& points, int k) {
    const auto s = static_cast<int>(points.rows());
    if (k < 1 || k >= s)
        throw InputError("kdist_graph: requires 1 <= k < number of points");
    KDistGraph graph;
    graph.k = k;
    graph.values.resize(static_cast<std::size_t>(s));
    std::vector<double> d2(static_cast<std::size_t>(s - 1));
    for (int i = 0; i < s; ++i) {
        int w = 0;
        for (int j = 0; j < s; ++j) {
            if (j == i) continue;
            d2[static_cast<std::size_t>(w++)] = (points.row(j) - points.row(i)).squaredNorm();
        }
        std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
        graph.values[static_cast<std::size_t>(i)] = std::sqrt(d2[static_cast<std::size_t>(k - 1)]);
    }
    std::sort(graph.values.begin(), graph.values.end(), std::greater<double>());
    return graph;
}

KneeResult detect_knee(const KDistGraph& graph) {
    const std::size_t s = graph.values.size();
    if (s < 3) throw InputError("detect_knee: needs at least 3 values");
    const double vmax = graph.values.front();
    const double vmin = graph.values.back();
    const double range = vmax - vmin;
    KneeResult result;
    if (!(range > 0.0)) {
        result.eps = vmax;
        result.index = 0;
        result.low_confidence = true;
        return result;
    }
    // Unit-square normalization; chord runs from (0,1) to (1,0), so the
    // perpendicular distance is |x + y - 1| / sqrt(2).
    double best = -1.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < s; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(s - 1);
        const double y = (graph.values[i] - vmin) / range;
        const double d = std::abs(x + y - 1.0);
        if (d > best) {
            best = d;
            at = i;
        }
    }
    result.eps = graph.values[at];
    result.index = at;
    result.low_confidence = best / std::sqrt(2.0) < 0.01;
    return result;
}

void write_kdist_csv(const KDistGraph& graph, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    std::fputs("rank,distance\n", f);
    for (std::size_t i = 0; i < graph.values.size(); ++i)
        std::fprintf(f, "%zu,%.17g\n", i + 1, graph.values[i]);
    if (std::fclose(f) != 0) throw InputError("write failed: " + path);
}

}  // namespace sdcor
