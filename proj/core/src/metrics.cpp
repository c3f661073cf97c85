#include "sdcor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sdcor {

namespace {

struct CurveCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
    // Cumulative (tp, fp) after each distinct threshold, descending.
    std::vector<std::pair<std::size_t, std::size_t>> steps;
};

CurveCounts sweep(const LabeledScores& ls) {
    if (ls.scores.size() != ls.labels.size())
        throw InputError("scores and labels differ in length");
    if (ls.scores.empty()) throw InputError("empty score list");
    CurveCounts counts;
    for (int lab : ls.labels) {
        if (lab == 1)
            ++counts.positives;
        else if (lab == 0)
            ++counts.negatives;
        else
            throw InputError("labels must be 0 or 1");
    }
    if (counts.positives == 0 || counts.negatives == 0)
        throw InputError("AUC needs both classes present");

    std::vector<std::size_t> order(ls.scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ls.scores[a] > ls.scores[b];
    });

    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = ls.scores[order[i]];
        while (i < order.size() && ls.scores[order[i]] == threshold) {
            if (ls.labels[order[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        counts.steps.emplace_back(tp, fp);
    }
    return counts;
}

// k x l contingency counts plus marginals.
struct Contingency {
    std::vector<std::vector<std::size_t>> cell;  // [cluster][class]
    std::vector<std::size_t> cluster_size;
    std::vector<std::size_t> class_size;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t l = 0;
};

Contingency cross(const PartitionPair& pp) {
    const auto& c = pp.predicted.assignments;
    const auto& d = pp.truth.assignments;
    if (c.size() != d.size()) throw InputError("partition pair length mismatch");
    if (c.empty()) throw InputError("empty partition pair");
    Contingency t;
    t.n = c.size();
    t.k = static_cast<std::size_t>(pp.predicted.k);
    t.l = static_cast<std::size_t>(pp.truth.k);
    t.cell.assign(t.k, std::vector<std::size_t>(t.l, 0));
    t.cluster_size.assign(t.k, 0);
    t.class_size.assign(t.l, 0);
    for (std::size_t i = 0; i < t.n; ++i) {
        if (c[i] < 1 || c[i] > pp.predicted.k || d[i] < 1 || d[i] > pp.truth.k)
            throw InputError("partition pair: every element must be assigned in both");
        ++t.cell[static_cast<std::size_t>(c[i] - 1)][static_cast<std::size_t>(d[i] - 1)];
        ++t.cluster_size[static_cast<std::size_t>(c[i] - 1)];
        ++t.class_size[static_cast<std::size_t>(d[i] - 1)];
    }
    return t;
}

}  // namespace

double auroc(const LabeledScores& ls) {
    const CurveCounts counts = sweep(ls);
    const double P = static_cast<double>(counts.positives);
    const double N = static_cast<double>(counts.negatives);
    double area = 0.0;
    double prev_tpr = 0.0;
    double prev_fpr = 0.0;
    for (const auto& [tp, fp] : counts.steps) {
        const double tpr = static_cast<double>(tp) / P;
        const double fpr = static_cast<double>(fp) / N;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return area;
}

double auprc(const LabeledScores& ls) {
    const CurveCounts counts = sweep(ls);
    const double P = static_cast<double>(counts.positives);
    double area = 0.0;
    double prev_recall = 0.0;
    for (const auto& [tp, fp] : counts.steps) {
        const double recall = static_cast<double>(tp) / P;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return area;
}

std::vector<std::pair<double, double>> roc_points(const LabeledScores& ls) {
    const CurveCounts counts = sweep(ls);
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (const auto& [tp, fp] : counts.steps)
        pts.emplace_back(static_cast<double>(fp) / static_cast<double>(counts.negatives),
                         static_cast<double>(tp) / static_cast<double>(counts.positives));
    return pts;
}

std::vector<std::pair<double, double>> pr_points(const LabeledScores& ls) {
    const CurveCounts counts = sweep(ls);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [tp, fp] : counts.steps)
        pts.emplace_back(static_cast<double>(tp) / static_cast<double>(counts.positives),
                         static_cast<double>(tp) / static_cast<double>(tp + fp));
    return pts;
}

double purity(const PartitionPair& pp) {
    const Contingency t = cross(pp);
    std::size_t sum = 0;
    for (std::size_t r = 0; r < t.k; ++r)
        sum += *std::max_element(t.cell[r].begin(), t.cell[r].end());
    return static_cast<double>(sum) / static_cast<double>(t.n);
}

double mirkin(const PartitionPair& pp) {
    const Contingency t = cross(pp);
    double acc = 0.0;
    for (std::size_t size : t.cluster_size)
        acc += static_cast<double>(size) * static_cast<double>(size);
    for (std::size_t size : t.class_size)
        acc += static_cast<double>(size) * static_cast<double>(size);
    for (std::size_t r = 0; r < t.k; ++r)
        for (std::size_t s = 0; s < t.l; ++s)
            acc -= 2.0 * static_cast<double>(t.cell[r][s]) * static_cast<double>(t.cell[r][s]);
    return acc / (static_cast<double>(t.n) * static_cast<double>(t.n));
}

double f_measure(const PartitionPair& pp) {
    const Contingency t = cross(pp);
    double total = 0.0;
    for (std::size_t r = 0; r < t.k; ++r) {
        double best = 0.0;
        for (std::size_t s = 0; s < t.l; ++s) {
            if (t.cell[r][s] == 0) continue;
            const double precision =
                static_cast<double>(t.cell[r][s]) / static_cast<double>(t.cluster_size[r]);
            const double recall =
                static_cast<double>(t.cell[r][s]) / static_cast<double>(t.class_size[s]);
            best = std::max(best, 2.0 * precision * recall / (precision + recall));
        }
        total += static_cast<double>(t.cluster_size[r]) * best;
    }
    return total / static_cast<double>(t.n);
}

double entropy(const PartitionPair& pp) {
    const Contingency t = cross(pp);
    if (t.l < 2) return 0.0;  // single class: every cluster is trivially pure
    const double norm = std::log(static_cast<double>(t.l));
    double total = 0.0;
    for (std::size_t r = 0; r < t.k; ++r) {
        double e = 0.0;
        for (std::size_t s = 0; s < t.l; ++s) {
            if (t.cell[r][s] == 0) continue;  // 0 log 0 contributes 0
            const double frac =
                static_cast<double>(t.cell[r][s]) / static_cast<double>(t.cluster_size[r]);
            e -= frac * std::log(frac);
        }
        total += static_cast<double>(t.cluster_size[r]) / static_cast<double>(t.n) * e / norm;
    }
    return total;
}

double variation_of_information(const PartitionPair& pp) {
    const Contingency t = cross(pp);
    if (t.n < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < t.k; ++r) {
        for (std::size_t s = 0; s < t.l; ++s) {
            const std::size_t inter = t.cell[r][s];
            if (inter == 0) continue;
            sum += static_cast<double>(inter) *
                   std::log(static_cast<double>(t.cluster_size[r]) *
                            static_cast<double>(t.class_size[s]) /
                            (static_cast<double>(inter) * static_cast<double>(inter)));
        }
    }
    return sum / (static_cast<double>(t.n) * std::log(static_cast<double>(t.n)));
}

Partition extract_outlier_partition(const ScoreTable& table, std::size_t o) {
    const std::size_t n = table.entries.size();
    if (n == 0) throw InputError("empty score table");
    if (o == 0 || o >= n) throw InputError("top-o must satisfy 0 < o < n");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (table.entries[a].score != table.entries[b].score)
            return table.entries[a].score > table.entries[b].score;
        return table.entries[a].row_index < table.entries[b].row_index;
    });

    std::vector<char> anomalous(n, 0);
    for (std::size_t i = 0; i < o; ++i) anomalous[order[i]] = 1;

    // Remap surviving cluster ids to contiguous 1..m by ascending original id.
    std::map<int, int> remap;
    for (std::size_t i = 0; i < n; ++i)
        if (!anomalous[i]) remap[table.entries[i].cluster_id] = 0;
    int next = 0;
    for (auto& [orig, fresh] : remap) fresh = ++next;

    Partition part;
    part.assignments.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = table.entries[i].row_index;
        if (row >= n) throw InputError("score table row index out of range");
        part.assignments[row] =
            anomalous[i] ? next + 1 : remap.at(table.entries[i].cluster_id);
    }
    part.k = next + 1;
    return part;
}

}  // namespace sdcor
