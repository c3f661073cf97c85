#include <doctest.h>

#include <random>
#include <set>

#include "oracles/oracle_cluster.hpp"
#include "sdcor/dbscan.hpp"
#include "test_util.hpp"

using namespace sdcor;

TEST_CASE("a single point below min_pts is noise") {
    Eigen::MatrixXd pts(1, 2);
    pts << 0, 0;
    const Partition part = dbscan(pts, {1.0, 2});
    CHECK(part.k == 0);
    CHECK(part.assignments == std::vector<int>{0});
}

TEST_CASE("coincident points form one cluster with no noise") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(10, 2);
    const Partition part = dbscan(pts, {0.5, 4});
    CHECK(part.k == 1);
    for (int a : part.assignments) CHECK(a == 1);
}

TEST_CASE("two blobs with stragglers match the quadratic reference exactly") {
    std::mt19937_64 rng(7);
    Eigen::MatrixXd pts(40, 2);
    pts.topRows(18) = testutil::spherical_blob(0, 0, 0.3, 18, rng);
    pts.middleRows(18, 19) = testutil::spherical_blob(10, 0, 0.3, 19, rng);
    pts.row(37) << 5.0, 5.0;
    pts.row(38) << -6.0, 3.0;
    pts.row(39) << 5.0, -7.0;

    const DbscanParams params{1.0, 4};
    const Partition part = dbscan(pts, params);
    const std::vector<int> ref = oracle::dbscan_reference(pts, params.eps, params.min_pts);
    CHECK(part.assignments == ref);
    CHECK(part.k == 2);
}

TEST_CASE("dbscan is invariant under translation") {
    std::mt19937_64 rng(17);
    Eigen::MatrixXd pts(45, 2);
    pts.topRows(20) = testutil::spherical_blob(0, 0, 0.4, 20, rng);
    pts.middleRows(20, 20) = testutil::spherical_blob(6, 2, 0.5, 20, rng);
    pts.bottomRows(5) = testutil::spherical_blob(3, -8, 3.0, 5, rng);
    const Partition before = dbscan(pts, {1.2, 5});
    Eigen::MatrixXd moved = pts;
    moved.rowwise() += Eigen::RowVector2d(123.5, -77.25);
    const Partition after = dbscan(moved, {1.2, 5});
    CHECK(before.assignments == after.assignments);
}

TEST_CASE("growing eps only grows the core-point set") {
    std::mt19937_64 rng(27);
    Eigen::MatrixXd pts = testutil::spherical_blob(0, 0, 1.5, 60, rng);
    const int min_pts = 5;
    auto cores = [&](double eps) {
        std::vector<bool> core(60, false);
        for (int i = 0; i < 60; ++i) {
            int close = 0;
            for (int j = 0; j < 60; ++j)
                if ((pts.row(i) - pts.row(j)).norm() <= eps) ++close;
            core[static_cast<std::size_t>(i)] = close >= min_pts;
        }
        return core;
    };
    const auto small = cores(0.5);
    const auto big = cores(0.9);
    for (int i = 0; i < 60; ++i)
        if (small[static_cast<std::size_t>(i)]) CHECK(big[static_cast<std::size_t>(i)]);
}

TEST_CASE("grid-accelerated neighbor queries agree with the brute path") {
    // p <= 3 and > 64 points routes through the grid; compare whole
    // partitions against the reference implementation.
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> eps_pick(0.2, 1.5);
    std::uniform_int_distribution<int> minpts_pick(2, 8);
    for (int rep = 0; rep < 30; ++rep) {
        const int p = 1 + rep % 3;
        std::uniform_real_distribution<double> unif(-4.0, 4.0);
        Eigen::MatrixXd pts(140, p);
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            for (int d = 0; d < p; ++d) pts(i, d) = unif(rng);
        const DbscanParams params{eps_pick(rng), minpts_pick(rng)};
        const Partition part = dbscan(pts, params);
        CHECK(part.assignments ==
              oracle::dbscan_reference(pts, params.eps, params.min_pts));
    }
}

TEST_CASE("coherence check counts dense clusters only") {
    std::mt19937_64 rng(47);
    SUBCASE("one tight blob is coherent") {
        const Eigen::MatrixXd pts = testutil::spherical_blob(0, 0, 0.2, 30, rng);
        CHECK(coherence_check(pts, {0.8, 4}));
    }
    SUBCASE("two separated blobs are not") {
        Eigen::MatrixXd pts(40, 2);
        pts.topRows(20) = testutil::spherical_blob(0, 0, 0.2, 20, rng);
        pts.bottomRows(20) = testutil::spherical_blob(8, 0, 0.2, 20, rng);
        CHECK_FALSE(coherence_check(pts, {0.8, 4}));
    }
    SUBCASE("distant stragglers below min_pts are ignored as noise") {
        Eigen::MatrixXd pts(32, 2);
        pts.topRows(30) = testutil::spherical_blob(0, 0, 0.2, 30, rng);
        pts.row(30) << 50.0, 50.0;
        pts.row(31) << -40.0, 60.0;
        const DbscanParams params{0.8, 4};
        CHECK(coherence_check(pts, params));
        // agreement with counting distinct nonzero ids
        const Partition part = dbscan(pts, params);
        std::set<int> ids;
        for (int a : part.assignments)
            if (a != 0) ids.insert(a);
        CHECK(ids.size() == 1);
        const std::vector<int> ref = oracle::dbscan_reference(pts, params.eps, params.min_pts);
        CHECK(part.assignments == ref);
    }
}
