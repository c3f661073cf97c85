#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdcor/common.hpp"

namespace sdcor {

/// Recipe for one labeled benchmark file: pruned correlated Gaussian clusters
/// plus shell-injected local outliers (label 1 in the trailing column).
struct GenSpec {
    int clusters = 1;
    std::vector<std::size_t> points_per_cluster;  // inliers per cluster
    int p = 2;
    double outlier_fraction = 0.01;  // share of the total emitted rows
    double inner_radius_mult = 4.0;
    double outer_radius_mult = 6.0;
    double prune_radius_mult = 1.0;
    std::uint64_t seed = 1;
};

struct GenResult {
    std::string csv_path;
    std::size_t rows = 0;
    std::size_t outliers = 0;
};

/// Writes the dataset CSV (features + trailing {0,1} label) and a key=value
/// manifest next to it. Bit-identical for identical specs.
GenResult generate(const GenSpec& spec, const std::string& csv_path,
                   const std::string& manifest_path);

/// Fixed 2-D four-cluster manifold of 20,000 inliers; 11 files whose outlier
/// counts sweep 10,000..30,000 in steps of 2,000. All members share identical
/// inlier rows for a fixed base seed.
std::vector<GenResult> generate_noise_ramp(std::uint64_t base_seed,
                                           const std::string& out_dir);

/// One 10-D four-cluster 200,000-point base set; ten members subsample it at
/// 10%..100% and each receives 200 injected outliers.
std::vector<GenResult> generate_scaling_family(std::uint64_t base_seed,
                                               const std::string& out_dir);

/// Convenience: splits n total rows into the spec's cluster/outlier counts.
GenSpec make_gen_spec(int clusters, int p, std::size_t total_rows,
                      double outlier_fraction, std::uint64_t seed);

// Generation internals, exposed for property tests.
namespace gen_detail {

/// Sigma = A^T A with A uniform in [0,1] and a random half of the entries
/// negated.
Eigen::MatrixXd random_covariance(int p, std::uint64_t seed);

/// Raw (pre-prune) Gaussian draws via the Cholesky factor.
Eigen::MatrixXd gaussian_rows(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                              std::size_t count, std::uint64_t seed);

/// Mutually separated cluster means: min pairwise distance at least
/// min_sep_mult * sqrt(max trace).
Eigen::MatrixXd separated_means(const std::vector<Eigen::MatrixXd>& sigmas,
                                std::uint64_t seed, double min_sep_mult = 10.0);

}  // namespace gen_detail

}  // namespace sdcor
