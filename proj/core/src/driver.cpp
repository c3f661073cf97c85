#include "sdcor/driver.hpp"

#include <chrono>
#include <cmath>

namespace sdcor {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int default_min_pts(std::size_t dataset_rows) {
    return std::max(2, static_cast<int>(std::floor(std::log(static_cast<double>(dataset_rows)))));
}

RunResult run_sdcor(const ChunkedDataset& ds, const RunOptions& options) {
    if (!(options.eta > 0.0) || options.eta > 1.0)
        throw InputError("eta must be in (0, 1]");
    if (!(options.lambda > 0.0) || options.lambda > 1.0)
        throw InputError("lambda must be in (0, 1]");
    if (!(options.alpha > 0.0) || !(options.beta > 0.0))
        throw InputError("alpha and beta must be positive");

    RunResult result;
    PipelineLog& log = result.log;

    // Phase 1: sampling, parameter tuning, initial model. A draw this small
    // can leave one sampled cluster below p+1 members; a fresh sample is the
    // standard remedy, so a bounded number of reseeded draws is attempted
    // before the infeasibility surfaces.
    const auto t0 = std::chrono::steady_clock::now();
    const int min_pts = options.min_pts > 0 ? options.min_pts : default_min_pts(ds.rows());
    TemporaryModel model;
    std::size_t sample_absorbed = 0;
    constexpr int kSampleAttempts = 8;
    for (int attempt = 0;; ++attempt) {
        const std::uint64_t attempt_seed =
            attempt == 0 ? options.seed
                         : mix_seed(options.seed, 0xa77e3b70ULL + static_cast<std::uint64_t>(attempt));
        SampleSet sample = random_sample(ds, options.eta, attempt_seed);
        log.add_cells(static_cast<std::size_t>(sample.rows.size()));
        try {
            if (options.explicit_params) {
                result.params = tuned_from_eps(sample, options.explicit_params->eps,
                                               options.explicit_params->min_pts);
            } else if (options.tune_mode == TuneMode::kKdist) {
                result.params = tune_by_kdist(sample, min_pts);
            } else {
                const int upper = options.pso_minpts_upper > 0
                                      ? options.pso_minpts_upper
                                      : std::max(2 * default_min_pts(ds.rows()), 8);
                PsoConfig cfg = make_pso_config(sample, ds.rows(), upper, attempt_seed);
                result.params = pso_tune(sample, cfg);
            }
            model = build_initial_model(sample, result.params, options.lambda,
                                        options.alpha, &log);
        } catch (const InfeasibleError&) {
            log.release_cells(static_cast<std::size_t>(sample.rows.size()));
            if (attempt + 1 >= kSampleAttempts) throw;
            continue;
        }
        result.sample_indices = sample.source_indices;
        result.sampling_attempts = attempt + 1;
        for (const Minicluster& mc : model.miniclusters) sample_absorbed += mc.stats.m;
        log.release_cells(static_cast<std::size_t>(sample.rows.size()));
        break;
    }
    result.t_initial = model.t_initial;
    result.phase1_seconds = seconds_since(t0);

    // Phase 2: scalable clustering over chunks.
    const auto t1 = std::chrono::steady_clock::now();
    RetainedSet retained;
    ChunkedDataset::Reader reader = ds.reader();
    Chunk chunk;
    std::size_t rows_fed = 0;
    std::size_t chunk_no = 0;
    while (reader.next(chunk)) {
        log.add_cells(static_cast<std::size_t>(chunk.rows.size()));
        rows_fed += static_cast<std::size_t>(chunk.rows.rows());
        process_chunk(model, chunk.rows, retained, result.params.original_params,
                      mix_seed(options.seed, 0xc0ffee00ULL + chunk_no), &log);
        ++chunk_no;

        // Conservation: every row seen so far was absorbed into a minicluster,
        // adopted by a fresh one, or still sits in the retained set. The
        // model's total membership must agree with that accounting.
        if (log.absorbed_total + log.adopted_total + retained.size() != rows_fed)
            throw InvariantError("row conservation failed after chunk " +
                                 std::to_string(chunk_no));
        std::size_t members = 0;
        for (const Minicluster& mc : model.miniclusters) members += mc.stats.m;
        if (members != sample_absorbed + log.absorbed_total + log.adopted_total)
            throw InvariantError("membership accounting mismatch after chunk " +
                                 std::to_string(chunk_no));
    }
    result.final_retained = retained.rows;
    log.release_cells(static_cast<std::size_t>(retained.rows.size()));
    retained.rows.resize(0, 0);

    result.minicluster_count = model.miniclusters.size();
    result.final_model = build_final_model(model, options.eta, options.beta, options.seed);
    result.phase2_seconds = seconds_since(t1);

    if (log.membership_violations != 0)
        throw InvariantError("membership guard violated during the run");
    if (log.determinant_violations != 0)
        throw InvariantError("determinant guard violated during the run");

    // Dataset memory stays bounded by one chunk plus the retained set (the
    // sample bound applies during phase 1 only).
    result.cell_bound =
        std::max(static_cast<std::size_t>(result.sample_indices.size()) * ds.cols(),
                 (ds.chunk_rows() + log.retained_rows_high_water) * ds.cols());
    if (log.live_cells_high_water > result.cell_bound)
        throw InvariantError("dataset memory high-water exceeded the chunk+retained bound");

    // Phase 3: scoring pass.
    const auto t2 = std::chrono::steady_clock::now();
    result.scores = score_dataset(ds, result.final_model, &log);
    result.phase3_seconds = seconds_since(t2);
    return result;
}

ScoreTable score_only(const ChunkedDataset& ds, const FinalModel& fm) {
    return score_dataset(ds, fm);
}

}  // namespace sdcor
