#include <doctest.h>

#include <cmath>
#include <random>

#include "sdcor/dbscan.hpp"
#include "sdcor/pso.hpp"
#include "sdcor/validity.hpp"
#include "test_util.hpp"

using namespace sdcor;

TEST_CASE("pso minimizes the sphere function inside the bounds") {
    const auto sphere = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    const std::vector<std::pair<double, double>> bounds{{-5.0, 5.0}, {-5.0, 5.0}};
    PsoConfig cfg;
    cfg.stagnation_limit = 50;  // no early stop for the convergence check
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        const PsoResult res = pso_minimize(sphere, bounds, cfg);
        CHECK(res.fitness < 1e-3);
        CHECK(std::abs(res.position(0)) < 0.1);
        CHECK(std::abs(res.position(1)) < 0.1);
        // gbest history never increases.
        for (std::size_t i = 1; i < res.history.size(); ++i)
            CHECK(res.history[i] <= res.history[i - 1]);
    }
}

TEST_CASE("every evaluated position stays within bounds") {
    const std::vector<std::pair<double, double>> bounds{{-1.5, 2.0}, {0.5, 4.0}};
    bool all_inside = true;
    const auto probe = [&](const Eigen::VectorXd& x) {
        for (Eigen::Index d = 0; d < x.size(); ++d) {
            const auto& [lo, hi] = bounds[static_cast<std::size_t>(d)];
            if (x(d) < lo || x(d) > hi) all_inside = false;
        }
        return (x - Eigen::Vector2d(1.9, 0.6)).squaredNorm();  // optimum near corners
    };
    PsoConfig cfg;
    cfg.seed = 5;
    pso_minimize(probe, bounds, cfg);
    CHECK(all_inside);
}

TEST_CASE("particles respect bounds via clamping") {
    // An objective that rewards escaping the box would drive positions out of
    // bounds without clamping; the optimum must still be reported in-bounds.
    const auto escape = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
    const std::vector<std::pair<double, double>> bounds{{-2.0, 3.0}};
    PsoConfig cfg;
    cfg.seed = 3;
    const PsoResult res = pso_minimize(escape, bounds, cfg);
    CHECK(res.position(0) >= -2.0);
    CHECK(res.position(0) <= 3.0);
    CHECK(res.fitness == doctest::Approx(-9.0));  // pinned at the wider bound
}

TEST_CASE("pso_tune on two clean Gaussians finds parameters that recover them") {
    std::mt19937_64 rng(9);
    SampleSet sample;
    sample.rate = 1.0;
    sample.rows.resize(150, 2);
    sample.rows.topRows(70) = testutil::spherical_blob(0, 0, 0.4, 70, rng);
    sample.rows.middleRows(70, 70) = testutil::spherical_blob(12, 0, 0.5, 70, rng);
    sample.rows.bottomRows(10) = testutil::spherical_blob(6, 9, 4.0, 10, rng);
    for (std::size_t i = 0; i < 150; ++i) sample.source_indices.push_back(i);

    PsoConfig cfg = make_pso_config(sample, 150, 30, 11);
    const TunedParams tuned = pso_tune(sample, cfg);

    CHECK(tuned.original_params.eps == doctest::Approx(tuned.sample_params.eps / 2.0));
    CHECK(tuned.original_params.min_pts == tuned.sample_params.min_pts);
    CHECK(std::isfinite(tuned.fitness));

    const Partition part = dbscan(sample.rows, tuned.sample_params);
    std::size_t noise = 0;
    for (int a : part.assignments) noise += a == 0 ? 1 : 0;
    CHECK(part.k == 2);
    CHECK(noise >= 1);

    // Grid-search oracle: the feasibility region (finite fitness) is nonempty
    // and the tuned fitness is no worse than a modest factor off the grid's
    // best.
    double grid_best = std::numeric_limits<double>::infinity();
    for (double eps = cfg.eps_bounds.first; eps <= cfg.eps_bounds.second;
         eps += (cfg.eps_bounds.second - cfg.eps_bounds.first) / 40.0) {
        for (int mp = cfg.minpts_bounds.first; mp <= cfg.minpts_bounds.second; ++mp) {
            const double f = fitness(sample.rows, {eps, mp});
            grid_best = std::min(grid_best, f);
        }
    }
    REQUIRE(std::isfinite(grid_best));
    CHECK(tuned.fitness <= grid_best * 1.10 + 1e-9);
}

TEST_CASE("pso_tune is deterministic for a fixed seed") {
    std::mt19937_64 rng(19);
    SampleSet sample;
    sample.rate = 1.0;
    sample.rows.resize(90, 2);
    sample.rows.topRows(40) = testutil::spherical_blob(0, 0, 0.5, 40, rng);
    sample.rows.middleRows(40, 40) = testutil::spherical_blob(9, 0, 0.5, 40, rng);
    sample.rows.bottomRows(10) = testutil::spherical_blob(4, 7, 3.0, 10, rng);

    PsoConfig cfg = make_pso_config(sample, 90, 25, 123);
    const TunedParams a = pso_tune(sample, cfg);
    const TunedParams b = pso_tune(sample, cfg);
    CHECK(a.sample_params.eps == b.sample_params.eps);
    CHECK(a.sample_params.min_pts == b.sample_params.min_pts);
    CHECK(a.fitness == b.fitness);
}

TEST_CASE("pso_tune reports infeasibility when every evaluation is infinite") {
    // Two coincident heaps: any parameters either cluster everything with no
    // noise, leave everything as noise, or produce singular clusters.
    SampleSet sample;
    sample.rate = 1.0;
    sample.rows = Eigen::MatrixXd::Zero(30, 2);
    sample.rows.bottomRows(15) = Eigen::MatrixXd::Constant(15, 2, 5.0);

    PsoConfig cfg;
    cfg.seed = 7;
    cfg.eps_bounds = {0.1, 20.0};
    cfg.minpts_bounds = {2, 10};
    cfg.iters = 10;
    CHECK_THROWS_AS(pso_tune(sample, cfg), InfeasibleError);
}

TEST_CASE("tune_by_kdist halves eps for the original distribution") {
    std::mt19937_64 rng(29);
    SampleSet sample;
    sample.rate = 1.0;
    sample.rows.resize(120, 2);
    sample.rows.topRows(55) = testutil::spherical_blob(0, 0, 0.4, 55, rng);
    sample.rows.middleRows(55, 55) = testutil::spherical_blob(10, 0, 0.4, 55, rng);
    sample.rows.bottomRows(10) = testutil::spherical_blob(5, 8, 3.0, 10, rng);

    const TunedParams tuned = tune_by_kdist(sample, 5);
    CHECK(tuned.sample_params.min_pts == 5);
    CHECK(tuned.original_params.eps == doctest::Approx(tuned.sample_params.eps / 2.0));
    CHECK(tuned.sample_params.eps > 0.0);
}
