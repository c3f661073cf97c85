#include "oracles/oracle_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace oracle {

double auroc_paircount(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

double auprc_threshold_enum(const std::vector<double>& scores,
                            const std::vector<int>& labels) {
    std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
    std::size_t positives = 0;
    for (int lab : labels) positives += lab == 1 ? 1 : 0;

    double area = 0.0;
    double prev_recall = 0.0;
    for (double t : thresholds) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] < t) continue;  // predicted positive at score >= t
            if (labels[i] == 1)
                ++tp;
            else
                ++fp;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(positives);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return area;
}

ValidityScores validity_reference(const std::vector<int>& predicted,
                                  const std::vector<int>& truth) {
    const auto n = static_cast<double>(predicted.size());
    std::map<int, std::map<int, double>> cell;
    std::map<int, double> csize;
    std::map<int, double> dsize;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        cell[predicted[i]][truth[i]] += 1.0;
        csize[predicted[i]] += 1.0;
        dsize[truth[i]] += 1.0;
    }
    const auto l = static_cast<double>(dsize.size());

    ValidityScores out;
    for (const auto& [r, row] : cell) {
        double best = 0.0;
        for (const auto& [s, cnt] : row) best = std::max(best, cnt);
        out.purity += best;
    }
    out.purity /= n;

    double mirkin = 0.0;
    for (const auto& [r, size] : csize) mirkin += size * size;
    for (const auto& [s, size] : dsize) mirkin += size * size;
    for (const auto& [r, row] : cell)
        for (const auto& [s, cnt] : row) mirkin -= 2.0 * cnt * cnt;
    out.mirkin = mirkin / (n * n);

    for (const auto& [r, row] : cell) {
        double best_f = 0.0;
        for (const auto& [s, cnt] : row) {
            const double precision = cnt / csize.at(r);
            const double recall = cnt / dsize.at(s);
            const double f = 2.0 * precision * recall / (precision + recall);
            best_f = std::max(best_f, f);
        }
        out.f_measure += csize.at(r) / n * best_f;
    }

    if (dsize.size() > 1) {
        for (const auto& [r, row] : cell) {
            double e = 0.0;
            for (const auto& [s, cnt] : row) {
                const double frac = cnt / csize.at(r);
                e -= frac * std::log(frac);
            }
            out.entropy += csize.at(r) / n * e / std::log(l);
        }
    }

    double vi = 0.0;
    for (const auto& [r, row] : cell)
        for (const auto& [s, cnt] : row)
            vi += cnt * std::log(csize.at(r) * dsize.at(s) / (cnt * cnt));
    out.vi = predicted.size() > 1 ? vi / (n * std::log(n)) : 0.0;
    return out;
}

double davies_bouldin_reference(const Eigen::MatrixXd& pts,
                                const std::vector<std::vector<int>>& groups) {
    const std::size_t k = groups.size();
    std::vector<Eigen::RowVectorXd> centroid(k);
    std::vector<double> scatter(k, 0.0);
    for (std::size_t g = 0; g < k; ++g) {
        Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(pts.cols());
        for (int i : groups[g]) c += pts.row(i);
        centroid[g] = c / static_cast<double>(groups[g].size());
        double sum = 0.0;
        for (int i : groups[g]) sum += (pts.row(i) - centroid[g]).norm();
        scatter[g] = sum / static_cast<double>(groups[g].size());
    }
    double db = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            worst = std::max(worst, (scatter[i] + scatter[j]) /
                                        (centroid[i] - centroid[j]).norm());
        }
        db += worst;
    }
    return db / static_cast<double>(k);
}

double cs_index_reference(const Eigen::MatrixXd& pts,
                          const std::vector<std::vector<int>>& groups) {
    const std::size_t k = groups.size();
    std::vector<Eigen::RowVectorXd> centroid(k);
    for (std::size_t g = 0; g < k; ++g) {
        Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(pts.cols());
        for (int i : groups[g]) c += pts.row(i);
        centroid[g] = c / static_cast<double>(groups[g].size());
    }
    double num = 0.0;
    for (const auto& g : groups) {
        double acc = 0.0;
        for (int a : g) {
            double far = 0.0;
            for (int b : g) far = std::max(far, (pts.row(a) - pts.row(b)).norm());
            acc += far;
        }
        num += acc / static_cast<double>(g.size());
    }
    double den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double nearest = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            nearest = std::min(nearest, (centroid[i] - centroid[j]).norm());
        }
        den += nearest;
    }
    return num / den;
}

}  // namespace oracle
