#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sdcor/pipeline.hpp"

namespace sdcor {

enum class TuneMode { kKdist, kPso };

struct RunOptions {
    double eta = 0.005;
    double lambda = 1.0;
    double alpha = 2.0;
    double beta = 2.0;
    std::uint64_t seed = 1;
    std::optional<DbscanParams> explicit_params;  // sampling-space values
    TuneMode tune_mode = TuneMode::kKdist;
    int min_pts = 0;          // 0 = floor(ln n)
    int pso_minpts_upper = 0; // 0 = max(2 * floor(ln n), 8)
};

struct RunResult {
    TunedParams params;
    int sampling_attempts = 1;
    int t_initial = 0;
    std::size_t minicluster_count = 0;
    FinalModel final_model;
    ScoreTable scores;
    PipelineLog log;
    std::vector<std::size_t> sample_indices;
    Eigen::MatrixXd final_retained;  // end-of-pass temporary outliers
    std::size_t cell_bound = 0;      // max(sample, chunk + retained peak) cells
    double phase1_seconds = 0.0;
    double phase2_seconds = 0.0;
    double phase3_seconds = 0.0;
};

/// Executes the full three-phase run over an opened dataset: sampling and
/// parameter tuning, chunked scalable clustering, and the scoring pass.
/// Verifies row conservation after every chunk and the guard counters at the
/// end; violations raise InvariantError.
RunResult run_sdcor(const ChunkedDataset& ds, const RunOptions& options);

/// Scoring-only pass against a prebuilt model.
ScoreTable score_only(const ChunkedDataset& ds, const FinalModel& fm);

int default_min_pts(std::size_t dataset_rows);

}  // namespace sdcor
