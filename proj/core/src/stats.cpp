#include "sdcor/stats.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace sdcor {

SuffStats SuffStats::from_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    SuffStats s(rows.cols());
    s.m = static_cast<std::size_t>(rows.rows());
    s.ls = rows.colwise().sum().transpose();
    s.ss = rows.transpose() * rows;
    return s;
}

void SuffStats::insert(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != ls.size())
        throw InputError("SuffStats::insert: dimension mismatch");
    ++m;
    ls += x;
    ss += x * x.transpose();
}

void SuffStats::merge(const SuffStats& other) {
    if (other.ls.size() != ls.size())
        throw InputError("SuffStats::merge: dimension mismatch");
    m += other.m;
    ls += other.ls;
    ss += other.ss;
}

Eigen::VectorXd SuffStats::mean() const {
    if (m == 0) throw InputError("SuffStats::mean: empty statistics");
    return ls / static_cast<double>(m);
}

Eigen::MatrixXd SuffStats::scatter() const {
    if (m == 0) throw InputError("SuffStats::scatter: empty statistics");
    const Eigen::VectorXd mu = mean();
    return ss - static_cast<double>(m) * (mu * mu.transpose());
}

Eigen::MatrixXd SuffStats::covariance() const {
    if (m < 2) throw InputError("SuffStats::covariance: needs m >= 2");
    return scatter() / static_cast<double>(m - 1);
}

namespace {

struct EigenDecomp {
    Eigen::VectorXd values;   // descending, unclamped
    Eigen::MatrixXd vectors;  // columns matching values
};

EigenDecomp decompose_sym(const Eigen::MatrixXd& cov) {
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw InputError("eigendecomposition failed");
    const Eigen::Index p = sym.rows();
    EigenDecomp d;
    d.values.resize(p);
    d.vectors.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {  // Eigen sorts ascending
        d.values(i) = solver.eigenvalues()(p - 1 - i);
        d.vectors.col(i) = solver.eigenvectors().col(p - 1 - i);
    }
    return d;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> col) {
    Eigen::Index at = 0;
    col.cwiseAbs().maxCoeff(&at);
    if (col(at) < 0.0) col = -col;
}

EigenBasis basis_from_decomp(const Eigen::VectorXd& mean, const EigenDecomp& d,
                             double energy) {
    const Eigen::Index p = d.values.size();
    Eigen::VectorXd lambda = d.values.cwiseMax(0.0);
    const double lmax = lambda(0);
    if (!(lmax > 0.0))
        throw InfeasibleError("all eigenvalues at or below the singularity floor");
    Eigen::Index keepable = 0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (lambda(i) > kSingularityFloor * lmax) {
            ++keepable;
            total += lambda(i);
        } else {
            break;  // sorted descending
        }
    }
    Eigen::Index pp = keepable;
    double csum = 0.0;
    for (Eigen::Index i = 0; i < keepable; ++i) {
        csum += lambda(i);
        if (csum >= energy * total * (1.0 - 1e-12)) {
            pp = i + 1;
            break;
        }
    }
    EigenBasis basis;
    basis.coeffs = d.vectors.leftCols(pp);
    for (Eigen::Index i = 0; i < pp; ++i) fix_sign(basis.coeffs.col(i));
    basis.sqrt_vars = lambda.head(pp).cwiseSqrt();
    basis.transformed_mean = basis.coeffs.transpose() * mean;
    return basis;
}

}  // namespace

EigenBasis derive_basis(const SuffStats& stats, double energy) {
    if (stats.m < 2) throw InputError("derive_basis: needs m >= 2");
    return derive_basis_cov(stats.mean(), stats.covariance(), energy);
}

EigenBasis derive_basis_cov(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                            double energy) {
    if (!(energy > 0.0) || energy > 1.0)
        throw InputError("energy share must be in (0, 1]");
    if (!cov.allFinite())
        throw InputError("covariance has non-finite entries");
    return basis_from_decomp(mean, decompose_sym(cov), energy);
}

double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x, const EigenBasis& basis) {
    if (x.size() != basis.dim())
        throw InputError("mahalanobis: dimension mismatch");
    if (!x.allFinite())
        throw InputError("mahalanobis: non-finite input");
    const Eigen::VectorXd z = basis.coeffs.transpose() * x;
    return ((z - basis.transformed_mean).cwiseQuotient(basis.sqrt_vars)).norm();
}

double cov_determinant(const SuffStats& stats) {
    if (stats.m < 2) throw InputError("cov_determinant: needs m >= 2");
    const Eigen::MatrixXd cov = stats.covariance();
    if (!cov.allFinite())
        throw InputError("cov_determinant: non-finite entries");
    const EigenDecomp d = decompose_sym(cov);
    double det = 1.0;
    for (Eigen::Index i = 0; i < d.values.size(); ++i) det *= d.values(i);
    return det;
}

bool is_singular(const SuffStats& stats) {
    if (stats.m <= static_cast<std::size_t>(stats.dim())) return true;
    Eigen::MatrixXd cov;
    try {
        cov = stats.covariance();
    } catch (const InputError&) {
        return true;
    }
    if (!cov.allFinite()) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (cov + cov.transpose()));
    if (solver.info() != Eigen::Success) return true;
    const auto& ev = solver.eigenvalues();
    if (!ev.allFinite()) return true;
    const double lmax = ev(ev.size() - 1);
    const double lmin = ev(0);
    if (!(lmax > 0.0)) return true;
    return lmin <= kSingularityFloor * lmax;
}

}  // namespace sdcor
