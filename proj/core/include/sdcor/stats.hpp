#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "sdcor/common.hpp"

namespace sdcor {

/// Relative eigenvalue floor below which a direction counts as collapsed.
inline constexpr double kSingularityFloor = 1e-10;

/// Exact sufficient statistics of a point set: count, linear sum and raw
/// second moment. Mean, scatter and covariance are re-derived on demand so
/// they always equal their batch definitions.
struct SuffStats {
    std::size_t m = 0;
    Eigen::VectorXd ls;  // sum of x
    Eigen::MatrixXd ss;  // sum of x x^T

    SuffStats() = default;
    explicit SuffStats(Eigen::Index p)
        : ls(Eigen::VectorXd::Zero(p)), ss(Eigen::MatrixXd::Zero(p, p)) {}

    static SuffStats from_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows);

    Eigen::Index dim() const { return ls.size(); }

    void insert(const Eigen::Ref<const Eigen::VectorXd>& x);
    void merge(const SuffStats& other);

    Eigen::VectorXd mean() const;        // m >= 1
    Eigen::MatrixXd scatter() const;     // ss - m * mu mu^T
    Eigen::MatrixXd covariance() const;  // scatter / (m - 1), m >= 2
};

/// Principal eigenstructure kept after the energy cut: unit-norm eigenvector
/// columns, the square roots of their variances (descending), and the source
/// mean expressed in that space.
struct EigenBasis {
    Eigen::MatrixXd coeffs;            // p x p'
    Eigen::VectorXd sqrt_vars;         // p', strictly positive, non-increasing
    Eigen::VectorXd transformed_mean;  // p'

    Eigen::Index dim() const { return coeffs.rows(); }
    Eigen::Index p_prime() const { return coeffs.cols(); }
};

/// Keeps the smallest count of top eigenvalues whose cumulative share of the
/// above-floor eigenvalue mass reaches `energy`. Eigenvector signs are fixed
/// by making each column's largest-magnitude component positive.
EigenBasis derive_basis(const SuffStats& stats, double energy);

/// Same cut applied directly to a (mean, covariance) pair.
EigenBasis derive_basis_cov(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                            double energy);

/// sqrt( sum_j ((z_j - mu'_j) / sqrt(lambda_j))^2 ) with z = A^T x. Carries a
/// square root so values compare directly against radii of the form c*sqrt(p').
double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x, const EigenBasis& basis);

/// Determinant of the symmetrized covariance, as the product of eigenvalues.
double cov_determinant(const SuffStats& stats);

/// True iff m <= p, or the smallest eigenvalue of the symmetrized covariance
/// is at most kSingularityFloor times the largest, or anything is non-finite.
/// Total function: never throws.
bool is_singular(const SuffStats& stats);

}  // namespace sdcor
