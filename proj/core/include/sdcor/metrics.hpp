#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sdcor/dataset.hpp"
#include "sdcor/dbscan.hpp"

namespace sdcor {

/// Scores with binary ground truth; label 1 marks the positive (outlier)
/// class. AUC computations require both classes to be present.
struct LabeledScores {
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Trapezoidal area under the ROC curve, descending thresholds, ties grouped.
double auroc(const LabeledScores& ls);

/// Step-wise area under the precision-recall curve: sum (R_i - R_{i-1}) P_i.
double auprc(const LabeledScores& ls);

/// Curve points for plotting: (FPR, TPR) and (Recall, Precision).
std::vector<std::pair<double, double>> roc_points(const LabeledScores& ls);
std::vector<std::pair<double, double>> pr_points(const LabeledScores& ls);

/// A clustering outcome against ground-truth classes over the same elements;
/// both sides must assign every element (no zeros).
struct PartitionPair {
    Partition predicted;
    Partition truth;
};

double purity(const PartitionPair& pp);
double mirkin(const PartitionPair& pp);
double f_measure(const PartitionPair& pp);
double entropy(const PartitionPair& pp);
double variation_of_information(const PartitionPair& pp);

/// Top-o scores (ties at the cut broken by lowest row index) become one
/// anomaly cluster; everything else keeps its assigned final cluster,
/// remapped to contiguous ids. The anomaly cluster takes the last id.
Partition extract_outlier_partition(const ScoreTable& table, std::size_t o);

}  // namespace sdcor
