#include "sdcor/dbscan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <memory>
#include <unordered_map>

namespace sdcor {

namespace {

class NeighborIndex {
public:
    virtual ~NeighborIndex() = default;
    // Indices j with |x_j - x_i| <= eps, ascending, including i itself.
    virtual void query(int i, std::vector<int>& out) const = 0;
};

class BruteIndex final : public NeighborIndex {
public:
    BruteIndex(const Eigen::MatrixXd& pts, double eps) : pts_(pts), eps2_(eps * eps) {}

    void query(int i, std::vector<int>& out) const override {
        out.clear();
        const auto n = static_cast<int>(pts_.rows());
        for (int j = 0; j < n; ++j) {
            if ((pts_.row(j) - pts_.row(i)).squaredNorm() <= eps2_) out.push_back(j);
        }
    }

private:
    const Eigen::MatrixXd& pts_;
    double eps2_;
};

// Uniform grid with cell side = eps; a query touches the 3^p cell block. The
// distance predicate matches BruteIndex bit for bit and results are sorted,
// so clustering output is identical to the quadratic scan.
class GridIndex final : public NeighborIndex {
public:
    GridIndex(const Eigen::MatrixXd& pts, double eps)
        : pts_(pts), eps_(eps), eps2_(eps * eps), p_(static_cast<int>(pts.cols())) {
        const auto n = static_cast<int>(pts.rows());
        cells_.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) cells_[key_of(i)].push_back(i);
    }

    void query(int i, std::vector<int>& out) const override {
        out.clear();
        std::array<std::int64_t, 3> base{0, 0, 0};
        for (int d = 0; d < p_; ++d) base[static_cast<std::size_t>(d)] = coord(i, d);
        std::array<std::int64_t, 3> c = base;
        walk(i, base, c, 0, out);
        std::sort(out.begin(), out.end());
        // Hash collisions can merge two cells' lists; drop the duplicates.
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

private:
    std::int64_t coord(int i, int d) const {
        return static_cast<std::int64_t>(std::floor(pts_(i, d) / eps_));
    }

    std::uint64_t key_from(const std::array<std::int64_t, 3>& c) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (int d = 0; d < p_; ++d) {
            h ^= static_cast<std::uint64_t>(c[static_cast<std::size_t>(d)]);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t key_of(int i) const {
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (int d = 0; d < p_; ++d) c[static_cast<std::size_t>(d)] = coord(i, d);
        return key_from(c);
    }

    void walk(int i, const std::array<std::int64_t, 3>& base, std::array<std::int64_t, 3>& c,
              int d, std::vector<int>& out) const {
        if (d == p_) {
            auto it = cells_.find(key_from(c));
            if (it == cells_.end()) return;
            for (int j : it->second) {
                if ((pts_.row(j) - pts_.row(i)).squaredNorm() <= eps2_) out.push_back(j);
            }
            return;
        }
        for (std::int64_t off = -1; off <= 1; ++off) {
            c[static_cast<std::size_t>(d)] = base[static_cast<std::size_t>(d)] + off;
            walk(i, base, c, d + 1, out);
        }
    }

    const Eigen::MatrixXd& pts_;
    double eps_;
    double eps2_;
    int p_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

Partition dbscan(const Eigen::MatrixXd& points, const DbscanParams& params) {
    if (!(params.eps > 0.0)) throw InputError("dbscan: eps must be positive");
    if (params.min_pts < 1) throw InputError("dbscan: min_pts must be >= 1");
    const auto n = static_cast<int>(points.rows());
    if (n < 1) throw InputError("dbscan: needs at least one point");

    std::unique_ptr<NeighborIndex> index;
    if (points.cols() <= 3 && n > 64)
        index = std::make_unique<GridIndex>(points, params.eps);
    else
        index = std::make_unique<BruteIndex>(points, params.eps);

    Partition part;
    part.assignments.assign(static_cast<std::size_t>(n), 0);
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<int> neigh;
    std::deque<int> seeds;
    int cluster = 0;

    for (int i = 0; i < n; ++i) {
        if (visited[static_cast<std::size_t>(i)]) continue;
        visited[static_cast<std::size_t>(i)] = 1;
        index->query(i, neigh);
        if (static_cast<int>(neigh.size()) < params.min_pts) continue;  // noise unless claimed later
        ++cluster;
        part.assignments[static_cast<std::size_t>(i)] = cluster;
        seeds.assign(neigh.begin(), neigh.end());
        while (!seeds.empty()) {
            const int j = seeds.front();
            seeds.pop_front();
            if (!visited[static_cast<std::size_t>(j)]) {
                visited[static_cast<std::size_t>(j)] = 1;
                index->query(j, neigh);
                if (static_cast<int>(neigh.size()) >= params.min_pts)
                    seeds.insert(seeds.end(), neigh.begin(), neigh.end());
            }
            if (part.assignments[static_cast<std::size_t>(j)] == 0)
                part.assignments[static_cast<std::size_t>(j)] = cluster;
        }
    }
    part.k = cluster;
    return part;
}

bool coherence_check(const Eigen::MatrixXd& points, const DbscanParams& params) {
    return dbscan(points, params).k == 1;
}

}  // namespace sdcor
