#pragma once

#include "driveml/matrix.hpp"
#include "driveml/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace driveml {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // rows with x < threshold go left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double predict(const FeatureMatrix& x, std::size_t row) const;
    int depth() const;
    std::size_t leaves() const;
};

/// Per-feature bin assignment used by the tree grower. Features with at most
/// `max_bins` distinct values get one bin per value, so candidate splits are
/// exactly the midpoints between consecutive distinct values. Wider features
/// are grouped into count-balanced bins whose boundaries are still midpoints
/// between adjacent observed values.
struct BinnedMatrix {
    std::size_t rows = 0;
    std::vector<std::vector<std::uint32_t>> bins;  // [feature][row]
    std::vector<std::vector<double>> thresholds;   // [feature][k] splits bin k | k+1

    static BinnedMatrix build(const FeatureMatrix& x, int max_bins);
    std::size_t n_features() const { return bins.size(); }
};

enum class SplitCriterion {
    Gini,    // 0/1 targets, leaf = positive proportion
    Newton,  // residual targets, leaf = sum(g) / max(sum(h), 1e-12), squared-error splits
};

struct GrowOptions {
    int max_depth = 30;
    int min_leaf = 1;
    double min_gain = 0.0;
    int mtry = 0;  // features tried per split; 0 or >= p means all
    SplitCriterion criterion = SplitCriterion::Gini;
    double leaf_scale = 1.0;  // multiplies leaf outputs (learning rate for boosting)
};

struct GrownTree {
    DecisionTree tree;
    std::vector<double> gain_by_feature;  // summed weighted impurity decrease
    std::vector<std::uint32_t> split_bin;  // per node, for in-sample routing
};

/// Greedy depth-first CART growth over `rows` (repeats allowed for
/// bootstrap samples). `hess` is only read for the Newton criterion. `rng`
/// is only used when mtry restricts the candidate features.
GrownTree grow_tree(const BinnedMatrix& x, std::vector<std::size_t> rows, std::span<const double> target,
                    std::span<const double> hess, const GrowOptions& options, Rng* rng);

/// Routes a training row using bin indices instead of raw thresholds.
double predict_binned(const GrownTree& grown, const BinnedMatrix& x, std::size_t row);

}  // namespace driveml
