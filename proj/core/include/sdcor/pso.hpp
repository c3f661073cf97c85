#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/dataset.hpp"
#include "sdcor/dbscan.hpp"
#include "sdcor/kdist.hpp"

namespace sdcor {

struct PsoConfig {
    int swarm = 30;
    int iters = 50;
    double w = 0.72;
    double c1 = 1.49;
    double c2 = 1.49;
    std::uint64_t seed = 1;
    std::pair<double, double> eps_bounds{0.0, 0.0};
    std::pair<int, int> minpts_bounds{0, 0};
    int stagnation_limit = 10;  // early stop after this many stale iterations
};

struct PsoResult {
    Eigen::VectorXd position;
    double fitness = 0.0;
    std::vector<double> history;  // gbest fitness after each iteration
    int iterations = 0;
};

/// Classical inertial PSO minimizer. Out-of-bound coordinates are clamped to
/// the violated bound; ties on gbest go to the lowest particle index.
PsoResult pso_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const std::vector<std::pair<double, double>>& bounds,
                       const PsoConfig& cfg);

struct TunedParams {
    DbscanParams sample_params;
    DbscanParams original_params;  // eps halved, same min_pts
    double fitness = 0.0;
};

/// Survey bounds per the sampled k-dist graph (eps) and floor(ln n) up to a
/// user ceiling (min_pts).
PsoConfig make_pso_config(const SampleSet& sample, std::size_t dataset_rows,
                          int minpts_upper, std::uint64_t seed);

/// PSO over (eps, min_pts); the MinPts coordinate is rounded to the nearest
/// integer at evaluation time. Throws InfeasibleError when every evaluation
/// is infinite.
TunedParams pso_tune(const SampleSet& sample, const PsoConfig& cfg);

/// Sorted k-distance heuristic: knee of the graph at k = min_pts - 1 gives
/// the sampling eps; the original-distribution eps is half of it.
TunedParams tune_by_kdist(const SampleSet& sample, int min_pts);

TunedParams tuned_from_eps(const SampleSet& sample, double eps_sample, int min_pts);

}  // namespace sdcor
