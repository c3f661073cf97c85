#include <doctest.h>

#include <random>
#include <set>

#include "sdcor/kmeans.hpp"
#include "test_util.hpp"

using namespace sdcor;

namespace {

double sse_of(const Eigen::MatrixXd& pts, const std::vector<int>& assign, int k) {
    Eigen::MatrixXd cent = Eigen::MatrixXd::Zero(k, pts.cols());
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        cent.row(assign[static_cast<std::size_t>(i)] - 1) += pts.row(i);
        ++count[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)] - 1)];
    }
    for (int c = 0; c < k; ++c) cent.row(c) /= count[static_cast<std::size_t>(c)];
    double sse = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        sse += (pts.row(i) - cent.row(assign[static_cast<std::size_t>(i)] - 1)).squaredNorm();
    return sse;
}

}  // namespace

TEST_CASE("k = 1 puts everything in one cluster") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd pts = testutil::spherical_blob(0, 0, 1.0, 25, rng);
    const Partition part = kmeans(pts, 1, 9);
    CHECK(part.k == 1);
    for (int a : part.assignments) CHECK(a == 1);
}

TEST_CASE("two separated blobs are recovered, verified by exhaustive SSE") {
    std::mt19937_64 rng(13);
    const int na = 6, nb = 6;
    Eigen::MatrixXd pts(na + nb, 2);
    pts.topRows(na) = testutil::spherical_blob(0, 0, 0.3, na, rng);
    pts.bottomRows(nb) = testutil::spherical_blob(9, 0, 0.3, nb, rng);

    const Partition part = kmeans(pts, 2, 17);
    REQUIRE(part.k == 2);
    // Exhaustive scan over all 2-partitions (n <= 12) for the minimal SSE.
    const int n = na + nb;
    double best = std::numeric_limits<double>::max();
    std::vector<int> best_assign;
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        std::vector<int> assign(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            assign[static_cast<std::size_t>(i)] = (mask >> i & 1) + 1;
        const double sse = sse_of(pts, assign, 2);
        if (sse < best) {
            best = sse;
            best_assign = assign;
        }
    }
    CHECK(sse_of(pts, part.assignments, 2) == doctest::Approx(best).epsilon(1e-9));
    // Optimal 2-partition is the blob split.
    std::set<int> first(best_assign.begin(), best_assign.begin() + na);
    CHECK(first.size() == 1);
}

TEST_CASE("k = s gives singleton clusters with zero SSE") {
    std::mt19937_64 rng(23);
    const Eigen::MatrixXd pts = testutil::spherical_blob(0, 0, 2.0, 9, rng);
    const KmeansResult res = kmeans_detailed(pts, 9, 41);
    CHECK(res.partition.k == 9);
    CHECK(res.sse == doctest::Approx(0.0));
    std::set<int> ids(res.partition.assignments.begin(), res.partition.assignments.end());
    CHECK(ids.size() == 9);
}

TEST_CASE("SSE is non-increasing across Lloyd iterations") {
    std::mt19937_64 rng(33);
    Eigen::MatrixXd pts(90, 2);
    pts.topRows(30) = testutil::spherical_blob(0, 0, 1.0, 30, rng);
    pts.middleRows(30, 30) = testutil::spherical_blob(5, 3, 1.2, 30, rng);
    pts.bottomRows(30) = testutil::spherical_blob(-4, 6, 0.8, 30, rng);
    const KmeansResult res = kmeans_detailed(pts, 3, 7);
    REQUIRE(!res.sse_history.empty());
    for (std::size_t i = 1; i < res.sse_history.size(); ++i)
        CHECK(res.sse_history[i] <= res.sse_history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("fixed seed reproduces the partition; k above s throws") {
    std::mt19937_64 rng(43);
    const Eigen::MatrixXd pts = testutil::spherical_blob(1, 1, 1.0, 30, rng);
    CHECK(kmeans(pts, 4, 5).assignments == kmeans(pts, 4, 5).assignments);
    CHECK_THROWS_AS(kmeans(pts, 31, 5), InputError);
}
