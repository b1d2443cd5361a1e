#pragma once

#include <cstdint>
#include <vector>

#include "catastrank/dataset.hpp"

namespace catastrank {

struct LinearModel {
    double beta0 = 0.0;
    std::vector<double> betas;  // one per feature, in feature_ids order
    bool regularized = false;   // ridge fallback was used
};

struct KnnModel {
    int k = 3;
    std::vector<std::vector<double>> train_x;  // row-major feature vectors
    std::vector<double> train_y;
};

struct TreeNode {
    int feature = -1;     // index into the feature-vector layout; -1 for leaves
    double split = 0.0;   // go left when x[feature] <= split
    double value = 0.0;   // training mean at this node
    int left = -1;
    int right = -1;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int min_leaf = 5;
};

// Features of sample t in feature_ids order, the row layout shared by all
// regressors in this module.
std::vector<double> feature_row(const Dataset& ds, int t);

// Ordinary least squares via column-pivoted QR. Rank-deficient designs fall
// back to ridge damping (lambda = 1e-8) and set the regularized flag.
LinearModel fit_linear(const Dataset& train);
double predict_linear(const LinearModel& model, const std::vector<double>& x);

KnnModel fit_knn(const Dataset& train, int k = 3);
// Unweighted mean of the k nearest training targets under Euclidean
// distance; ties broken by lowest training index.
double predict_knn(const KnnModel& model, const std::vector<double>& x);

// Greedy variance-reduction regression tree grown to min_leaf, then pruned
// bottom-up against a seeded holdout split (reduced error pruning).
TreeModel fit_tree(const Dataset& train, double prune = 0.2, int min_leaf = 5,
                   std::uint64_t seed = 0);
double predict_tree(const TreeModel& model, const std::vector<double>& x);

double mae(const std::vector<double>& pred, const std::vector<double>& truth);
double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

}  // namespace catastrank
