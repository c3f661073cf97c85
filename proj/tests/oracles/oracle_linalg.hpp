// Reference linear algebra for tests. Everything here is deliberately
// independent of the library's computation paths: eigen-decomposition via
// cyclic Jacobi sweeps, determinants via cofactor expansion, and inverses via
// Gauss-Jordan elimination. Eigen is used as a container type only.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct JacobiEigen {
    std::vector<double> values;       // descending
    Eigen::MatrixXd vectors;          // columns matching values
};

/// Cyclic Jacobi rotations on a symmetric matrix until off-diagonal mass is
/// negligible.
JacobiEigen jacobi_eigen(const Eigen::MatrixXd& sym);

/// Recursive cofactor expansion; fine for p <= 7.
double det_cofactor(const Eigen::MatrixXd& a);

/// Gauss-Jordan inversion with partial pivoting.
Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& a);

/// sqrt( (x - mu)^T Sigma^{-1} (x - mu) ) through the explicit inverse.
double mahalanobis_inverse(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& sigma);

/// Two-pass batch mean and covariance (centered sums).
void batch_mean_cov(const Eigen::MatrixXd& rows, Eigen::VectorXd& mean,
                    Eigen::MatrixXd& cov);

}  // namespace oracle
