#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/dataset.hpp"
#include "sdcor/dbscan.hpp"
#include "sdcor/pso.hpp"
#include "sdcor/stats.hpp"

namespace sdcor {

/// One temporary cluster: exact sufficient statistics, the eigenbasis derived
/// from them under the model's energy share, and the index (1-based) of the
/// nearest initial cluster.
struct Minicluster {
    SuffStats stats;
    EigenBasis basis;
    int nearest_initial = 0;
};

/// The evolving temporary clustering model. The first t_initial entries are
/// the sampling-stage clusters; det_thresholds holds their covariance
/// determinants frozen at sampling time.
struct TemporaryModel {
    std::vector<Minicluster> miniclusters;
    int t_initial = 0;
    std::vector<double> det_thresholds;
    double energy = 1.0;
    double alpha = 2.0;
};

struct FinalCluster {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    EigenBasis basis;  // full-rank basis of sigma
};

struct FinalModel {
    std::vector<FinalCluster> clusters;
};

/// Rows not yet absorbed by any minicluster, carried across chunks.
struct RetainedSet {
    Eigen::MatrixXd rows;

    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
    bool empty() const { return rows.rows() == 0; }
    void append(const Eigen::MatrixXd& extra);
};

/// Counters and guard checks accumulated over one pipeline run.
struct ChunkCounters {
    std::size_t chunk_index = 0;
    std::size_t rows = 0;
    std::size_t absorbed = 0;
    std::size_t new_miniclusters = 0;
    std::size_t split_searches = 0;
    std::size_t retained_after = 0;
};

struct PipelineLog {
    std::vector<ChunkCounters> per_chunk;
    std::size_t absorbed_total = 0;
    std::size_t adopted_total = 0;  // rows that seeded new miniclusters
    std::size_t membership_checks = 0;
    std::size_t membership_violations = 0;
    std::size_t determinant_checks = 0;
    std::size_t determinant_violations = 0;

    // Dataset-cell accounting (sample + chunk + retained buffers).
    std::size_t live_cells = 0;
    std::size_t live_cells_high_water = 0;
    std::size_t retained_rows_high_water = 0;

    void add_cells(std::size_t n) {
        live_cells += n;
        live_cells_high_water = std::max(live_cells_high_water, live_cells);
    }
    void release_cells(std::size_t n) { live_cells -= std::min(n, live_cells); }
};

struct UpdateResult {
    std::vector<int> updated;  // 0-based minicluster indices that absorbed points
    Eigen::MatrixXd leftover;
};

/// DBSCAN on the sample with the tuned sampling parameters; every discovered
/// cluster becomes an initial minicluster and its covariance determinant is
/// frozen into det_thresholds. Noise points are discarded.
TemporaryModel build_initial_model(const SampleSet& sample, const TunedParams& params,
                                   double energy, double alpha, PipelineLog* log = nullptr);

/// Appends one minicluster per group. nu = 0 marks the sampling stage, where
/// each group receives its own 1-based index; otherwise all groups carry nu.
void add_miniclusters(TemporaryModel& model, const std::vector<Eigen::MatrixXd>& groups,
                      int nu);

/// One membership pass: each point goes to its closest candidate minicluster
/// if within alpha * sqrt(p'), exact statistics are folded in, and every
/// candidate that accepted members has its basis re-derived. Distances are
/// evaluated against the basis snapshot taken before the pass.
UpdateResult minicluster_update(TemporaryModel& model, const Eigen::MatrixXd& points,
                                const std::vector<int>& candidates,
                                PipelineLog* log = nullptr);

/// Membership/update cycle over the retained set until no candidate changes.
void retset_memb(TemporaryModel& model, RetainedSet& retained, std::vector<int> candidates,
                 PipelineLog* log = nullptr);

/// DBSCAN over the retained rows with the original-distribution parameters;
/// regular clusters are adopted, irregular ones (determinant above the
/// nearest initial threshold) go through the minimal K-means split whose
/// pieces are all coherent, non-singular and within the threshold. Rejected
/// clusters return to the retained set together with DBSCAN noise.
void retset_clust(TemporaryModel& model, RetainedSet& retained,
                  const DbscanParams& original_params, std::uint64_t seed,
                  PipelineLog* log = nullptr);

/// One chunk iteration: chunk membership against all live miniclusters,
/// retained sweep over the updated ones, clustering of what remains, then a
/// final sweep over the newly created miniclusters.
void process_chunk(TemporaryModel& model, const Eigen::MatrixXd& chunk,
                   RetainedSet& retained, const DbscanParams& original_params,
                   std::uint64_t seed, PipelineLog* log = nullptr);

/// Groups miniclusters by nearest initial cluster. Singletons pass through
/// exactly; groups are merged by regenerating max(round(eta*m), p+1) Gaussian
/// points per member, pruning the pool at beta * sqrt(p), and taking the
/// pruned pool's covariance.
FinalModel build_final_model(const TemporaryModel& model, double eta, double beta,
                             std::uint64_t seed);

/// Second full pass: minimal Mahalanobis distance to the final clusters (full
/// rank), with ties going to the lowest cluster index.
ScoreTable score_dataset(const ChunkedDataset& ds, const FinalModel& fm,
                         PipelineLog* log = nullptr);

/// In-memory variant used by tests and the driver's chunk loop.
void score_rows(const Eigen::MatrixXd& rows, const FinalModel& fm,
                std::vector<double>& scores, std::vector<int>& cluster_ids);

}  // namespace sdcor
