#include "sdcor/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sdcor/stats.hpp"

namespace sdcor {

namespace gen_detail {

Eigen::MatrixXd random_covariance(int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd a(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = unit(rng);
    std::vector<int> flat(static_cast<std::size_t>(p * p));
    std::iota(flat.begin(), flat.end(), 0);
    std::shuffle(flat.begin(), flat.end(), rng);
    for (std::size_t i = 0; i < flat.size() / 2; ++i)
        a(flat[i] / p, flat[i] % p) *= -1.0;
    return a.transpose() * a;
}

Eigen::MatrixXd gaussian_rows(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                              std::size_t count, std::uint64_t seed) {
    const Eigen::Index p = mu.size();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    Eigen::MatrixXd factor;
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        factor = es.eigenvectors() *
                 es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), p);
    Eigen::VectorXd z(p);
    for (std::size_t r = 0; r < count; ++r) {
        for (Eigen::Index d = 0; d < p; ++d) z(d) = normal(rng);
        out.row(static_cast<Eigen::Index>(r)) = (mu + factor * z).transpose();
    }
    return out;
}

Eigen::MatrixXd separated_means(const std::vector<Eigen::MatrixXd>& sigmas,
                                std::uint64_t seed, double min_sep_mult) {
    const auto c = static_cast<int>(sigmas.size());
    const auto p = static_cast<int>(sigmas.front().rows());
    double max_trace = 0.0;
    for (const auto& s : sigmas) max_trace = std::max(max_trace, s.trace());
    const double min_sep = min_sep_mult * std::sqrt(max_trace);
    const double span = min_sep * static_cast<double>(c) * 2.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd means(c, p);
    for (int i = 0; i < c; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            Eigen::RowVectorXd cand(p);
            for (int d = 0; d < p; ++d) cand(d) = span * unit(rng);
            placed = true;
            for (int j = 0; j < i; ++j) {
                if ((cand - means.row(j)).norm() < min_sep) {
                    placed = false;
                    break;
                }
            }
            if (placed) means.row(i) = cand;
        }
        if (!placed)
            throw InfeasibleError("could not place mutually separated cluster means");
    }
    return means;
}

}  // namespace gen_detail

namespace {

// The injection hypercube is pinned to the default outer shell (6 sqrt(p) per
// Mahalanobis axis), so widening the accepted interval genuinely raises the
// rejection-sampling acceptance in high dimensions.
constexpr double kBoxMult = 6.0;
constexpr int kShellBudgetPerOutlier = 10000;

struct ClusterDraws {
    Eigen::MatrixXd inliers;
    Eigen::MatrixXd outliers;
};

// Precomputed per-cluster geometry for distance evaluation.
struct ClusterShape {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    EigenBasis basis;  // full-rank
    Eigen::VectorXd box_half;
};

ClusterShape make_shape(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, int p) {
    ClusterShape shape;
    shape.mu = mu;
    shape.sigma = sigma;
    shape.basis = derive_basis_cov(mu, sigma, 1.0);
    shape.box_half = kBoxMult * std::sqrt(static_cast<double>(p)) *
                     sigma.diagonal().cwiseSqrt();
    return shape;
}

// Inliers: rejection sampling from N(mu, sigma) until `count` points fall
// inside the prune radius.
Eigen::MatrixXd draw_inliers(const ClusterShape& shape, std::size_t count,
                             double prune_mult, std::uint64_t seed) {
    const Eigen::Index p = shape.mu.size();
    const double radius = prune_mult * std::sqrt(static_cast<double>(p));
    Eigen::LLT<Eigen::MatrixXd> llt(shape.sigma);
    Eigen::MatrixXd factor;
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape.sigma);
        factor = es.eigenvectors() *
                 es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), p);
    Eigen::VectorXd z(p), x(p);
    std::size_t got = 0;
    std::size_t attempts = 0;
    const std::size_t budget = count * 1000 + 100000;
    while (got < count) {
        if (++attempts > budget)
            throw InfeasibleError("inlier rejection budget exhausted; raise prune radius");
        for (Eigen::Index d = 0; d < p; ++d) z(d) = normal(rng);
        x = shape.mu + factor * z;
        if (mahalanobis(x, shape.basis) <= radius)
            out.row(static_cast<Eigen::Index>(got++)) = x.transpose();
    }
    return out;
}

// Outliers: uniform draws in the cluster's bounding hypercube, accepted iff
// the Mahalanobis distance falls in [inner, outer] * sqrt(p).
Eigen::MatrixXd draw_outliers(const ClusterShape& shape, std::size_t count, double inner,
                              double outer, std::uint64_t seed) {
    const Eigen::Index p = shape.mu.size();
    const double lo = inner * std::sqrt(static_cast<double>(p));
    const double hi = outer * std::sqrt(static_cast<double>(p));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), p);
    Eigen::VectorXd x(p);
    std::size_t got = 0;
    long long budget = static_cast<long long>(count) * kShellBudgetPerOutlier;
    while (got < count) {
        if (--budget < 0)
            throw InfeasibleError(
                "outlier shell rejection budget exhausted; widen the shell "
                "(raise the outer radius multiplier)");
        for (Eigen::Index d = 0; d < p; ++d)
            x(d) = shape.mu(d) + shape.box_half(d) * unit(rng);
        const double dist = mahalanobis(x, shape.basis);
        if (dist >= lo && dist <= hi)
            out.row(static_cast<Eigen::Index>(got++)) = x.transpose();
    }
    return out;
}

void write_rows(std::FILE* f, const Eigen::MatrixXd& rows, int label) {
    std::string line;
    char buf[64];
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        line.clear();
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g,", rows(i, j));
            line.append(buf, static_cast<std::size_t>(len));
        }
        line += label == 0 ? "0\n" : "1\n";
        std::fputs(line.c_str(), f);
    }
}

std::vector<std::size_t> split_count(std::size_t total, int parts) {
    std::vector<std::size_t> out(static_cast<std::size_t>(parts), total / parts);
    for (std::size_t i = 0; i < total % static_cast<std::size_t>(parts); ++i) ++out[i];
    return out;
}

}  // namespace

GenSpec make_gen_spec(int clusters, int p, std::size_t total_rows, double outlier_fraction,
                      std::uint64_t seed) {
    if (clusters < 1 || p < 1 || total_rows < static_cast<std::size_t>(clusters))
        throw InputError("gen spec: bad cluster count, dimensionality or size");
    if (!(outlier_fraction >= 0.0) || outlier_fraction >= 1.0)
        throw InputError("gen spec: outlier fraction must be in [0, 1)");
    const auto outliers = static_cast<std::size_t>(
        std::llround(outlier_fraction * static_cast<double>(total_rows)));
    GenSpec spec;
    spec.clusters = clusters;
    spec.p = p;
    spec.outlier_fraction = outlier_fraction;
    spec.seed = seed;
    spec.points_per_cluster = split_count(total_rows - outliers, clusters);
    return spec;
}

GenResult generate(const GenSpec& spec, const std::string& csv_path,
                   const std::string& manifest_path) {
    if (spec.clusters < 1 ||
        spec.points_per_cluster.size() != static_cast<std::size_t>(spec.clusters))
        throw InputError("gen spec: points_per_cluster must list every cluster");
    if (!(spec.inner_radius_mult < spec.outer_radius_mult))
        throw InputError("gen spec: inner radius must be below outer radius");
    if (!(spec.outlier_fraction >= 0.0) || spec.outlier_fraction >= 1.0)
        throw InputError("gen spec: outlier fraction must be in [0, 1)");
    for (std::size_t c : spec.points_per_cluster)
        if (c < 2) throw InputError("gen spec: clusters need at least 2 points");

    std::vector<Eigen::MatrixXd> sigmas;
    sigmas.reserve(static_cast<std::size_t>(spec.clusters));
    for (int c = 0; c < spec.clusters; ++c)
        sigmas.push_back(gen_detail::random_covariance(
            spec.p, mix_seed(spec.seed, 0x5160'0000ULL + static_cast<std::uint64_t>(c))));
    const Eigen::MatrixXd means =
        gen_detail::separated_means(sigmas, mix_seed(spec.seed, 0x3ea7ULL));

    std::size_t total_inliers = 0;
    for (std::size_t c : spec.points_per_cluster) total_inliers += c;
    const auto total_outliers = static_cast<std::size_t>(std::llround(
        spec.outlier_fraction / (1.0 - spec.outlier_fraction) *
        static_cast<double>(total_inliers)));
    const std::vector<std::size_t> outliers_per_cluster =
        split_count(total_outliers, spec.clusters);

    std::vector<ClusterDraws> draws(static_cast<std::size_t>(spec.clusters));
    for (int c = 0; c < spec.clusters; ++c) {
        const ClusterShape shape =
            make_shape(means.row(c).transpose(), sigmas[static_cast<std::size_t>(c)], spec.p);
        draws[static_cast<std::size_t>(c)].inliers = draw_inliers(
            shape, spec.points_per_cluster[static_cast<std::size_t>(c)],
            spec.prune_radius_mult,
            mix_seed(spec.seed, 0x111'0000ULL + static_cast<std::uint64_t>(c)));
        draws[static_cast<std::size_t>(c)].outliers = draw_outliers(
            shape, outliers_per_cluster[static_cast<std::size_t>(c)],
            spec.inner_radius_mult, spec.outer_radius_mult,
            mix_seed(spec.seed, 0x222'0000ULL + static_cast<std::uint64_t>(c)));
    }

    std::FILE* f = std::fopen(csv_path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + csv_path);
    for (const auto& d : draws) write_rows(f, d.inliers, 0);
    for (const auto& d : draws) write_rows(f, d.outliers, 1);
    if (std::fclose(f) != 0) throw InputError("write failed: " + csv_path);

    if (!manifest_path.empty()) {
        std::FILE* m = std::fopen(manifest_path.c_str(), "w");
        if (!m) throw InputError("cannot open for writing: " + manifest_path);
        std::fprintf(m, "clusters=%d\n", spec.clusters);
        std::fprintf(m, "p=%d\n", spec.p);
        std::fprintf(m, "outlier_fraction=%.17g\n", spec.outlier_fraction);
        std::fprintf(m, "inner_radius_mult=%.17g\n", spec.inner_radius_mult);
        std::fprintf(m, "outer_radius_mult=%.17g\n", spec.outer_radius_mult);
        std::fprintf(m, "prune_radius_mult=%.17g\n", spec.prune_radius_mult);
        std::fprintf(m, "seed=%llu\n", static_cast<unsigned long long>(spec.seed));
        std::fprintf(m, "rows=%zu\n", total_inliers + total_outliers);
        std::fprintf(m, "outliers=%zu\n", total_outliers);
        std::string ppc;
        for (std::size_t c : spec.points_per_cluster)
            ppc += std::to_string(c) + ";";
        std::fprintf(m, "points_per_cluster=%s\n", ppc.c_str());
        if (std::fclose(m) != 0) throw InputError("write failed: " + manifest_path);
    }

    GenResult result;
    result.csv_path = csv_path;
    result.rows = total_inliers + total_outliers;
    result.outliers = total_outliers;
    return result;
}

namespace {

// Correlated covariance rescaled to unit determinant. The experiment families
// share one fixed manifold; comparable cluster volumes keep a single global
// eps window between the inlier and shell density bands.
Eigen::MatrixXd balanced_covariance(int p, std::uint64_t seed) {
    Eigen::MatrixXd sigma = gen_detail::random_covariance(p, seed);
    const double det = sigma.determinant();
    return sigma / std::pow(det, 1.0 / static_cast<double>(p));
}

// Rotated 2-D covariance with unit determinant and bounded eccentricity, for
// the noise-ramp manifold: a stretched shell would otherwise reach far enough
// to overlap a neighbor's injection band at high contamination.
Eigen::MatrixXd ramp_covariance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 3.14159265358979323846);
    std::uniform_real_distribution<double> stretch(1.2, 2.5);
    const double theta = angle(rng);
    const double l1 = stretch(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Vector2d lam(l1, 1.0 / l1);
    return rot * lam.asDiagonal() * rot.transpose();
}

// Family manifolds separate means wider than the single-file generator so
// adjacent outlier shells cannot intersect even at 150% contamination.
constexpr double kFamilySeparation = 25.0;

}  // namespace

std::vector<GenResult> generate_noise_ramp(std::uint64_t base_seed,
                                           const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    constexpr int kClusters = 4;
    constexpr int kP = 2;
    constexpr std::size_t kInliers = 20000;

    std::vector<Eigen::MatrixXd> sigmas;
    for (int c = 0; c < kClusters; ++c)
        sigmas.push_back(ramp_covariance(
            mix_seed(base_seed, 0x5160'0000ULL + static_cast<std::uint64_t>(c))));
    const Eigen::MatrixXd means = gen_detail::separated_means(
        sigmas, mix_seed(base_seed, 0x3ea7ULL), kFamilySeparation);

    std::vector<ClusterShape> shapes;
    std::vector<Eigen::MatrixXd> inliers;
    const std::vector<std::size_t> per_cluster = split_count(kInliers, kClusters);
    for (int c = 0; c < kClusters; ++c) {
        shapes.push_back(
            make_shape(means.row(c).transpose(), sigmas[static_cast<std::size_t>(c)], kP));
        inliers.push_back(draw_inliers(
            shapes.back(), per_cluster[static_cast<std::size_t>(c)], 1.0,
            mix_seed(base_seed, 0x111'0000ULL + static_cast<std::uint64_t>(c))));
    }

    std::vector<GenResult> out;
    for (int step = 0; step <= 10; ++step) {
        const std::size_t total_outliers = 10000 + 2000 * static_cast<std::size_t>(step);
        const std::vector<std::size_t> opc = split_count(total_outliers, kClusters);
        const int pct = 50 + 10 * step;
        char name[64];
        std::snprintf(name, sizeof name, "ramp_%03d.csv", pct);
        const std::string path = (fs::path(out_dir) / name).string();

        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + path);
        for (const auto& block : inliers) write_rows(f, block, 0);
        for (int c = 0; c < kClusters; ++c) {
            const Eigen::MatrixXd shell = draw_outliers(
                shapes[static_cast<std::size_t>(c)], opc[static_cast<std::size_t>(c)], 4.0,
                6.0,
                mix_seed(base_seed, 0x222'0000ULL +
                                        static_cast<std::uint64_t>(step * 101 + c)));
            write_rows(f, shell, 1);
        }
        if (std::fclose(f) != 0) throw InputError("write failed: " + path);
        out.push_back({path, kInliers + total_outliers, total_outliers});
    }
    return out;
}

std::vector<GenResult> generate_scaling_family(std::uint64_t base_seed,
                                               const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    constexpr int kClusters = 4;
    constexpr int kP = 10;
    constexpr std::size_t kBaseRows = 200000;
    constexpr std::size_t kOutliers = 200;
    constexpr double kOuter = 30.0;  // feasible shell width at p = 10

    std::vector<Eigen::MatrixXd> sigmas;
    for (int c = 0; c < kClusters; ++c)
        sigmas.push_back(balanced_covariance(
            kP, mix_seed(base_seed, 0x5160'0000ULL + static_cast<std::uint64_t>(c))));
    const Eigen::MatrixXd means = gen_detail::separated_means(
        sigmas, mix_seed(base_seed, 0x3ea7ULL), kFamilySeparation);

    std::vector<ClusterShape> shapes;
    std::vector<Eigen::MatrixXd> base_blocks;
    const std::vector<std::size_t> per_cluster = split_count(kBaseRows, kClusters);
    for (int c = 0; c < kClusters; ++c) {
        shapes.push_back(
            make_shape(means.row(c).transpose(), sigmas[static_cast<std::size_t>(c)], kP));
        base_blocks.push_back(draw_inliers(
            shapes.back(), per_cluster[static_cast<std::size_t>(c)], 1.0,
            mix_seed(base_seed, 0x111'0000ULL + static_cast<std::uint64_t>(c))));
    }
    Eigen::MatrixXd base(kBaseRows, kP);
    Eigen::Index at = 0;
    for (const auto& b : base_blocks) {
        base.middleRows(at, b.rows()) = b;
        at += b.rows();
    }

    std::vector<GenResult> out;
    for (int step = 1; step <= 10; ++step) {
        const auto want = static_cast<std::size_t>(kBaseRows / 10 * static_cast<std::size_t>(step));
        // Subset inliers drawn from the base set without replacement.
        std::vector<std::size_t> idx(kBaseRows);
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(mix_seed(base_seed, 0x5ca1eULL + static_cast<std::uint64_t>(step)));
        for (std::size_t i = 0; i < want; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, kBaseRows - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }

        char name[64];
        std::snprintf(name, sizeof name, "scale_%03d.csv", step * 10);
        const std::string path = (fs::path(out_dir) / name).string();
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + path);
        Eigen::MatrixXd row(1, kP);
        for (std::size_t i = 0; i < want; ++i) {
            row = base.row(static_cast<Eigen::Index>(idx[i]));
            write_rows(f, row, 0);
        }
        const std::vector<std::size_t> opc = split_count(kOutliers, kClusters);
        for (int c = 0; c < kClusters; ++c) {
            const Eigen::MatrixXd shell = draw_outliers(
                shapes[static_cast<std::size_t>(c)], opc[static_cast<std::size_t>(c)], 4.0,
                kOuter,
                mix_seed(base_seed, 0x222'0000ULL +
                                        static_cast<std::uint64_t>(step * 101 + c)));
            write_rows(f, shell, 1);
        }
        if (std::fclose(f) != 0) throw InputError("write failed: " + path);
        out.push_back({path, want + kOutliers, kOutliers});
    }
    return out;
}

}  // namespace sdcor
