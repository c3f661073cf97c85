#include "sdcor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "sdcor/kmeans.hpp"

namespace sdcor {

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& src, const std::vector<int>& which) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(which.size()), src.cols());
    for (std::size_t r = 0; r < which.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = src.row(which[r]);
    return out;
}

}  // namespace

void RetainedSet::append(const Eigen::MatrixXd& extra) {
    if (extra.rows() == 0) return;
    if (rows.rows() == 0) {
        rows = extra;
        return;
    }
    const Eigen::Index old = rows.rows();
    rows.conservativeResize(old + extra.rows(), Eigen::NoChange);
    rows.bottomRows(extra.rows()) = extra;
}

void add_miniclusters(TemporaryModel& model, const std::vector<Eigen::MatrixXd>& groups,
                      int nu) {
    const bool sampling_stage = nu == 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Eigen::MatrixXd& rows = groups[g];
        if (rows.rows() < 2)
            throw InputError("add_miniclusters: group needs at least 2 points");
        Minicluster mc;
        mc.stats = SuffStats::from_rows(rows);
        mc.basis = derive_basis(mc.stats, model.energy);
        mc.nearest_initial = sampling_stage ? static_cast<int>(g) + 1 : nu;
        model.miniclusters.push_back(std::move(mc));
    }
}

TemporaryModel build_initial_model(const SampleSet& sample, const TunedParams& params,
                                   double energy, double alpha, PipelineLog* log) {
    if (sample.rows.rows() == 0) throw InputError("build_initial_model: empty sample");
    TemporaryModel model;
    model.energy = energy;
    model.alpha = alpha;

    const Partition part = dbscan(sample.rows, params.sample_params);
    if (part.k == 0)
        throw InfeasibleError(
            "sampling produced only noise; raise the sampling rate or widen eps");

    std::vector<std::vector<int>> members(static_cast<std::size_t>(part.k));
    for (std::size_t i = 0; i < part.assignments.size(); ++i)
        if (part.assignments[i] != 0)
            members[static_cast<std::size_t>(part.assignments[i] - 1)].push_back(
                static_cast<int>(i));

    std::vector<Eigen::MatrixXd> groups;
    groups.reserve(members.size());
    for (const auto& m : members) {
        Eigen::MatrixXd rows = take_rows(sample.rows, m);
        if (is_singular(SuffStats::from_rows(rows)))
            throw InfeasibleError(
                "an initial sampled cluster is singular; raise the sampling rate");
        groups.push_back(std::move(rows));
    }
    add_miniclusters(model, groups, 0);
    model.t_initial = part.k;

    model.det_thresholds.reserve(static_cast<std::size_t>(part.k));
    for (int i = 0; i < part.k; ++i)
        model.det_thresholds.push_back(
            cov_determinant(model.miniclusters[static_cast<std::size_t>(i)].stats));
    (void)log;
    return model;
}

UpdateResult minicluster_update(TemporaryModel& model, const Eigen::MatrixXd& points,
                                const std::vector<int>& candidates, PipelineLog* log) {
    UpdateResult result;
    const Eigen::Index n = points.rows();
    if (n == 0) {
        result.leftover.resize(0, points.cols());
        return result;
    }
    if (candidates.empty()) {
        result.leftover = points;
        return result;
    }
    std::vector<int> order = candidates;
    std::sort(order.begin(), order.end());

    // Distances against the pre-pass basis snapshots; assignment decisions are
    // committed in input order below. Strict < over ascending candidate order
    // sends ties to the lowest minicluster index.
    Eigen::VectorXd best_dist = Eigen::VectorXd::Constant(
        n, std::numeric_limits<double>::infinity());
    std::vector<int> best_idx(static_cast<std::size_t>(n), -1);
    for (int c : order) {
        const EigenBasis& basis = model.miniclusters[static_cast<std::size_t>(c)].basis;
        Eigen::MatrixXd z = points * basis.coeffs;
        z.rowwise() -= basis.transformed_mean.transpose();
        z.array().rowwise() /= basis.sqrt_vars.transpose().array();
        const Eigen::VectorXd dist = z.rowwise().norm();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dist(i) < best_dist(i)) {
                best_dist(i) = dist(i);
                best_idx[static_cast<std::size_t>(i)] = c;
            }
        }
    }

    std::vector<char> accepted_any(model.miniclusters.size(), 0);
    std::vector<int> leftover_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int b = best_idx[static_cast<std::size_t>(i)];
        Minicluster& mc = model.miniclusters[static_cast<std::size_t>(b)];
        const double radius = model.alpha * std::sqrt(static_cast<double>(mc.basis.p_prime()));
        if (best_dist(i) <= radius) {
            if (log) {
                // Re-verify the accepted distance through the scalar route.
                ++log->membership_checks;
                const double check = mahalanobis(points.row(i).transpose(), mc.basis);
                if (check > radius * (1.0 + 1e-9)) ++log->membership_violations;
                ++log->absorbed_total;
            }
            mc.stats.insert(points.row(i).transpose());
            accepted_any[static_cast<std::size_t>(b)] = 1;
        } else {
            leftover_rows.push_back(static_cast<int>(i));
        }
    }

    for (int c : order) {
        if (!accepted_any[static_cast<std::size_t>(c)]) continue;
        Minicluster& mc = model.miniclusters[static_cast<std::size_t>(c)];
        mc.basis = derive_basis(mc.stats, model.energy);
        result.updated.push_back(c);
    }
    result.leftover = take_rows(points, leftover_rows);
    return result;
}

void retset_memb(TemporaryModel& model, RetainedSet& retained, std::vector<int> candidates,
                 PipelineLog* log) {
    while (!candidates.empty() && !retained.empty()) {
        UpdateResult res = minicluster_update(model, retained.rows, candidates, log);
        if (log && retained.rows.rows() > res.leftover.rows())
            log->release_cells(static_cast<std::size_t>(
                (retained.rows.rows() - res.leftover.rows()) * retained.rows.cols()));
        retained.rows = std::move(res.leftover);
        candidates = std::move(res.updated);
    }
}

void retset_clust(TemporaryModel& model, RetainedSet& retained,
                  const DbscanParams& original_params, std::uint64_t seed,
                  PipelineLog* log) {
    if (retained.empty()) return;
    const Eigen::Index p = retained.rows.cols();
    const Partition part = dbscan(retained.rows, original_params);

    std::vector<std::vector<int>> members(static_cast<std::size_t>(part.k));
    for (std::size_t i = 0; i < part.assignments.size(); ++i)
        if (part.assignments[i] != 0)
            members[static_cast<std::size_t>(part.assignments[i] - 1)].push_back(
                static_cast<int>(i));

    std::vector<char> resolved(static_cast<std::size_t>(retained.rows.rows()), 0);
    std::uint64_t split_counter = 0;

    for (std::size_t ci = 0; ci < members.size(); ++ci) {
        const std::vector<int>& rows_idx = members[ci];
        Eigen::MatrixXd rows = take_rows(retained.rows, rows_idx);
        SuffStats stats = SuffStats::from_rows(rows);
        if (is_singular(stats)) continue;  // back to noise

        const Eigen::VectorXd centroid = stats.mean();
        int nu = 1;
        double best = std::numeric_limits<double>::infinity();
        for (int h = 0; h < model.t_initial; ++h) {
            const double d =
                mahalanobis(centroid, model.miniclusters[static_cast<std::size_t>(h)].basis);
            if (d < best) {
                best = d;
                nu = h + 1;
            }
        }
        const double threshold = model.det_thresholds[static_cast<std::size_t>(nu - 1)];
        const double det = cov_determinant(stats);

        std::vector<Eigen::MatrixXd> adopt;
        if (det > threshold) {
            // Irregular minicluster: minimal K-means split whose pieces all
            // pass coherence, non-singularity and the determinant cap.
            if (log && !log->per_chunk.empty()) ++log->per_chunk.back().split_searches;
            const auto kmax = static_cast<int>(rows.rows() / (p + 1));
            for (int k2 = 2; k2 <= kmax; ++k2) {
                const Partition split =
                    kmeans(rows, k2, mix_seed(seed, 0x5eedULL + split_counter++));
                std::vector<std::vector<int>> piece_idx(static_cast<std::size_t>(split.k));
                for (std::size_t i = 0; i < split.assignments.size(); ++i)
                    piece_idx[static_cast<std::size_t>(split.assignments[i] - 1)].push_back(
                        static_cast<int>(i));
                std::vector<Eigen::MatrixXd> pieces;
                bool ok = true;
                for (const auto& idx : piece_idx) {
                    Eigen::MatrixXd piece = take_rows(rows, idx);
                    SuffStats pstats = SuffStats::from_rows(piece);
                    if (is_singular(pstats) || cov_determinant(pstats) > threshold ||
                        !coherence_check(piece, original_params)) {
                        ok = false;
                        break;
                    }
                    pieces.push_back(std::move(piece));
                }
                if (ok) {
                    adopt = std::move(pieces);
                    break;
                }
            }
            if (adopt.empty()) continue;  // no split found: back to noise
        } else {
            adopt.push_back(std::move(rows));
        }

        if (log) {
            log->determinant_checks += adopt.size();
            for (const Eigen::MatrixXd& piece : adopt)
                if (cov_determinant(SuffStats::from_rows(piece)) > threshold)
                    ++log->determinant_violations;
            log->adopted_total += rows_idx.size();
            if (!log->per_chunk.empty())
                log->per_chunk.back().new_miniclusters += adopt.size();
        }
        add_miniclusters(model, adopt, nu);
        for (int r : rows_idx) resolved[static_cast<std::size_t>(r)] = 1;
    }

    std::vector<int> keep;
    for (Eigen::Index i = 0; i < retained.rows.rows(); ++i)
        if (!resolved[static_cast<std::size_t>(i)]) keep.push_back(static_cast<int>(i));
    if (log)
        log->release_cells(static_cast<std::size_t>(
            (retained.rows.rows() - static_cast<Eigen::Index>(keep.size())) * p));
    retained.rows = take_rows(retained.rows, keep);
}

void process_chunk(TemporaryModel& model, const Eigen::MatrixXd& chunk,
                   RetainedSet& retained, const DbscanParams& original_params,
                   std::uint64_t seed, PipelineLog* log) {
    std::size_t absorbed_before = 0;
    if (log) {
        absorbed_before = log->absorbed_total;
        ChunkCounters counters;
        counters.chunk_index = log->per_chunk.size();
        counters.rows = static_cast<std::size_t>(chunk.rows());
        log->per_chunk.push_back(counters);
    }

    std::vector<int> all(model.miniclusters.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    UpdateResult res = minicluster_update(model, chunk, all, log);
    if (log)
        log->release_cells(static_cast<std::size_t>(
            (chunk.rows() - res.leftover.rows()) * chunk.cols()));
    retained.append(res.leftover);

    if (!retained.empty()) {
        retset_memb(model, retained, res.updated, log);
        if (!retained.empty()) {
            const auto before = static_cast<int>(model.miniclusters.size());
            retset_clust(model, retained, original_params, seed, log);
            std::vector<int> fresh;
            for (auto i = before; i < static_cast<int>(model.miniclusters.size()); ++i)
                fresh.push_back(i);
            if (!retained.empty() && !fresh.empty())
                retset_memb(model, retained, fresh, log);
        }
    }
    if (log) {
        ChunkCounters& counters = log->per_chunk.back();
        counters.absorbed = log->absorbed_total - absorbed_before;
        counters.retained_after = retained.size();
        log->retained_rows_high_water =
            std::max(log->retained_rows_high_water, retained.size());
    }
}

namespace {

// Draws `count` points from N(mu, sigma) through the Cholesky factor; falls
// back to the eigenvalue square root when sigma is numerically indefinite.
Eigen::MatrixXd sample_gaussian_rows(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                                     std::size_t count, std::mt19937_64& rng) {
    const Eigen::Index p = mu.size();
    const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
    Eigen::MatrixXd factor;
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        factor = es.eigenvectors() *
                 es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), p);
    Eigen::VectorXd z(p);
    for (std::size_t r = 0; r < count; ++r) {
        for (Eigen::Index d = 0; d < p; ++d) z(d) = normal(rng);
        out.row(static_cast<Eigen::Index>(r)) = (mu + factor * z).transpose();
    }
    return out;
}

}  // namespace

FinalModel build_final_model(const TemporaryModel& model, double eta, double beta,
                             std::uint64_t seed) {
    if (model.t_initial < 1) throw InputError("build_final_model: empty model");
    const Eigen::Index p = model.miniclusters.front().stats.dim();

    std::vector<std::vector<int>> groups(static_cast<std::size_t>(model.t_initial));
    for (std::size_t i = 0; i < model.miniclusters.size(); ++i) {
        const int nu = model.miniclusters[i].nearest_initial;
        if (nu < 1 || nu > model.t_initial)
            throw InvariantError("minicluster carries an out-of-range initial index");
        groups[static_cast<std::size_t>(nu - 1)].push_back(static_cast<int>(i));
    }

    FinalModel fm;
    fm.clusters.reserve(groups.size());
    std::mt19937_64 rng(mix_seed(seed, 0xf17a1ULL));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty())
            throw InfeasibleError("initial cluster " + std::to_string(g + 1) +
                                  " has no miniclusters; sampling failed to seed it");
        FinalCluster fc;
        if (groups[g].size() == 1) {
            const Minicluster& mc =
                model.miniclusters[static_cast<std::size_t>(groups[g].front())];
            fc.mu = mc.stats.mean();
            fc.sigma = mc.stats.covariance();
        } else {
            double total = 0.0;
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
            for (int j : groups[g]) {
                const Minicluster& mc = model.miniclusters[static_cast<std::size_t>(j)];
                const auto w = static_cast<double>(mc.stats.m);
                mu += w * mc.stats.mean();
                total += w;
            }
            fc.mu = mu / total;

            std::vector<Eigen::MatrixXd> blocks;
            std::size_t pool_rows = 0;
            for (int j : groups[g]) {
                const Minicluster& mc = model.miniclusters[static_cast<std::size_t>(j)];
                const auto want = std::max<std::size_t>(
                    static_cast<std::size_t>(
                        std::llround(eta * static_cast<double>(mc.stats.m))),
                    static_cast<std::size_t>(p + 1));
                blocks.push_back(sample_gaussian_rows(mc.stats.mean(),
                                                      mc.stats.covariance(), want, rng));
                pool_rows += want;
            }
            Eigen::MatrixXd pool(static_cast<Eigen::Index>(pool_rows), p);
            Eigen::Index at = 0;
            for (const auto& b : blocks) {
                pool.middleRows(at, b.rows()) = b;
                at += b.rows();
            }

            const SuffStats pool_stats = SuffStats::from_rows(pool);
            const EigenBasis pool_basis =
                derive_basis_cov(pool_stats.mean(), pool_stats.covariance(), 1.0);
            const double radius = beta * std::sqrt(static_cast<double>(p));
            std::vector<int> keep;
            for (Eigen::Index r = 0; r < pool.rows(); ++r)
                if (mahalanobis(pool.row(r).transpose(), pool_basis) <= radius)
                    keep.push_back(static_cast<int>(r));
            if (keep.size() < static_cast<std::size_t>(p + 1))
                throw InfeasibleError(
                    "final-model pruning removed nearly all regenerated points");
            fc.sigma = SuffStats::from_rows(take_rows(pool, keep)).covariance();
        }
        fc.basis = derive_basis_cov(fc.mu, fc.sigma, 1.0);
        if (fc.basis.p_prime() < p)
            throw InfeasibleError("final cluster covariance is singular");
        fm.clusters.push_back(std::move(fc));
    }
    return fm;
}

void score_rows(const Eigen::MatrixXd& rows, const FinalModel& fm,
                std::vector<double>& scores, std::vector<int>& cluster_ids) {
    const Eigen::Index n = rows.rows();
    scores.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    cluster_ids.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t c = 0; c < fm.clusters.size(); ++c) {
        const EigenBasis& basis = fm.clusters[c].basis;
        if (rows.cols() != basis.dim())
            throw InputError("score: dimension mismatch with the model");
        Eigen::MatrixXd z = rows * basis.coeffs;
        z.rowwise() -= basis.transformed_mean.transpose();
        z.array().rowwise() /= basis.sqrt_vars.transpose().array();
        const Eigen::VectorXd dist = z.rowwise().norm();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dist(i) < scores[static_cast<std::size_t>(i)]) {
                scores[static_cast<std::size_t>(i)] = dist(i);
                cluster_ids[static_cast<std::size_t>(i)] = static_cast<int>(c) + 1;
            }
        }
    }
}

ScoreTable score_dataset(const ChunkedDataset& ds, const FinalModel& fm, PipelineLog* log) {
    ScoreTable table;
    table.entries.reserve(ds.rows());
    ChunkedDataset::Reader reader = ds.reader();
    Chunk chunk;
    std::vector<double> scores;
    std::vector<int> ids;
    while (reader.next(chunk)) {
        if (log) log->add_cells(static_cast<std::size_t>(chunk.rows.size()));
        score_rows(chunk.rows, fm, scores, ids);
        for (Eigen::Index i = 0; i < chunk.rows.rows(); ++i) {
            ScoreEntry e;
            e.row_index = chunk.first_row + static_cast<std::size_t>(i);
            e.score = scores[static_cast<std::size_t>(i)];
            e.cluster_id = ids[static_cast<std::size_t>(i)];
            if (chunk.labels.size() > 0)
                e.label = static_cast<int>(chunk.labels(i));
            table.entries.push_back(e);
        }
        if (log) log->release_cells(static_cast<std::size_t>(chunk.rows.size()));
    }
    return table;
}

}  // namespace sdcor
