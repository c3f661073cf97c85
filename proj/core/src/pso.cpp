#include "sdcor/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sdcor/validity.hpp"

namespace sdcor {

PsoResult pso_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const std::vector<std::pair<double, double>>& bounds,
                       const PsoConfig& cfg) {
    const auto dims = static_cast<Eigen::Index>(bounds.size());
    if (dims < 1) throw InputError("pso: needs at least one dimension");
    if (cfg.swarm < 2) throw InputError("pso: swarm size must be >= 2");
    if (cfg.iters < 1) throw InputError("pso: iteration count must be >= 1");
    if (!(cfg.w > 0.0) || !(cfg.c1 > 0.0) || !(cfg.c2 > 0.0))
        throw InputError("pso: w, c1, c2 must be positive");
    for (const auto& [lo, hi] : bounds)
        if (!(lo < hi)) throw InputError("pso: bound low must be below high");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int P = cfg.swarm;
    std::vector<Eigen::VectorXd> pos(static_cast<std::size_t>(P)),
        vel(static_cast<std::size_t>(P)), pbest(static_cast<std::size_t>(P));
    std::vector<double> pbest_fit(static_cast<std::size_t>(P),
                                  std::numeric_limits<double>::infinity());

    for (int i = 0; i < P; ++i) {
        auto& x = pos[static_cast<std::size_t>(i)];
        x.resize(dims);
        for (Eigen::Index d = 0; d < dims; ++d) {
            const auto& [lo, hi] = bounds[static_cast<std::size_t>(d)];
            x(d) = lo + (hi - lo) * unit(rng);
        }
        vel[static_cast<std::size_t>(i)] = Eigen::VectorXd::Zero(dims);
        const double f = objective(x);
        pbest[static_cast<std::size_t>(i)] = x;
        pbest_fit[static_cast<std::size_t>(i)] = f;
    }

    int gbest = 0;
    for (int i = 1; i < P; ++i)
        if (pbest_fit[static_cast<std::size_t>(i)] < pbest_fit[static_cast<std::size_t>(gbest)])
            gbest = i;

    PsoResult result;
    int stale = 0;
    for (int t = 0; t < cfg.iters; ++t) {
        const double before = pbest_fit[static_cast<std::size_t>(gbest)];
        for (int i = 0; i < P; ++i) {
            auto& x = pos[static_cast<std::size_t>(i)];
            auto& v = vel[static_cast<std::size_t>(i)];
            for (Eigen::Index d = 0; d < dims; ++d) {
                const double r1 = unit(rng);
                const double r2 = unit(rng);
                v(d) = cfg.w * v(d) +
                       cfg.c1 * r1 * (pbest[static_cast<std::size_t>(i)](d) - x(d)) +
                       cfg.c2 * r2 * (pbest[static_cast<std::size_t>(gbest)](d) - x(d));
                x(d) += v(d);
                const auto& [lo, hi] = bounds[static_cast<std::size_t>(d)];
                if (x(d) < lo) x(d) = lo;
                if (x(d) > hi) x(d) = hi;
            }
            const double f = objective(x);
            if (f < pbest_fit[static_cast<std::size_t>(i)]) {
                pbest_fit[static_cast<std::size_t>(i)] = f;
                pbest[static_cast<std::size_t>(i)] = x;
            }
        }
        for (int i = 0; i < P; ++i)
            if (pbest_fit[static_cast<std::size_t>(i)] <
                pbest_fit[static_cast<std::size_t>(gbest)])
                gbest = i;
        result.history.push_back(pbest_fit[static_cast<std::size_t>(gbest)]);
        result.iterations = t + 1;
        stale = pbest_fit[static_cast<std::size_t>(gbest)] < before ? 0 : stale + 1;
        if (stale >= cfg.stagnation_limit) break;
    }

    result.position = pbest[static_cast<std::size_t>(gbest)];
    result.fitness = pbest_fit[static_cast<std::size_t>(gbest)];
    return result;
}

PsoConfig make_pso_config(const SampleSet& sample, std::size_t dataset_rows,
                          int minpts_upper, std::uint64_t seed) {
    const auto s = static_cast<int>(sample.rows.rows());
    if (s < 3) throw InputError("pso config: sample too small");
    const int minpts_low =
        std::max(2, static_cast<int>(std::floor(std::log(static_cast<double>(dataset_rows)))));
    if (minpts_upper <= minpts_low)
        throw InputError("pso config: min_pts upper bound must exceed floor(ln n)");

    const int k = std::clamp(minpts_low - 1, 1, s - 1);
    const KDistGraph graph = kdist_graph(sample.rows, k);
    double hi = graph.values.front();
    double lo = graph.values.back();
    if (!(hi > 0.0))
        throw InfeasibleError("pso config: all sampled points coincide");
    lo = std::max(lo, 1e-12 * hi);

    PsoConfig cfg;
    cfg.seed = seed;
    cfg.eps_bounds = {lo, hi};
    cfg.minpts_bounds = {minpts_low, minpts_upper};
    return cfg;
}

TunedParams tuned_from_eps(const SampleSet& sample, double eps_sample, int min_pts) {
    if (!(eps_sample > 0.0)) throw InputError("eps must be positive");
    if (min_pts < 1) throw InputError("min_pts must be >= 1");
    TunedParams tuned;
    tuned.sample_params = {eps_sample, min_pts};
    tuned.original_params = {eps_sample / 2.0, min_pts};
    tuned.fitness = fitness(sample.rows, tuned.sample_params);
    return tuned;
}

TunedParams pso_tune(const SampleSet& sample, const PsoConfig& cfg) {
    if (!(cfg.eps_bounds.first < cfg.eps_bounds.second))
        throw InputError("pso_tune: bad eps bounds");
    if (cfg.minpts_bounds.first < 1 || cfg.minpts_bounds.first >= cfg.minpts_bounds.second)
        throw InputError("pso_tune: bad min_pts bounds");

    const Eigen::MatrixXd& rows = sample.rows;
    auto objective = [&rows](const Eigen::VectorXd& x) {
        const DbscanParams params{x(0), static_cast<int>(std::llround(x(1)))};
        return fitness(rows, params);
    };
    const std::vector<std::pair<double, double>> bounds{
        cfg.eps_bounds,
        {static_cast<double>(cfg.minpts_bounds.first),
         static_cast<double>(cfg.minpts_bounds.second)}};
    const PsoResult res = pso_minimize(objective, bounds, cfg);
    if (!std::isfinite(res.fitness))
        throw InfeasibleError(
            "pso_tune: no feasible DBSCAN parameters found (all fitness infinite)");
    return tuned_from_eps(sample, res.position(0),
                          static_cast<int>(std::llround(res.position(1))));
}

TunedParams tune_by_kdist(const SampleSet& sample, int min_pts) {
    const auto s = static_cast<int>(sample.rows.rows());
    if (min_pts < 2) throw InputError("tune_by_kdist: min_pts must be >= 2");
    const int k = min_pts - 1;  // range queries count the point itself
    if (k >= s) throw InputError("tune_by_kdist: min_pts too large for the sample");
    const KDistGraph graph = kdist_graph(sample.rows, k);
    const KneeResult knee = detect_knee(graph);
    if (!(knee.eps > 0.0))
        throw InfeasibleError("tune_by_kdist: degenerate k-dist graph (zero knee)");
    return tuned_from_eps(sample, knee.eps, min_pts);
}

}  // namespace sdcor
