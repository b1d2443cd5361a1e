#include "catastrank/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "catastrank/errors.hpp"
#include "catastrank/rng.hpp"

namespace catastrank {
namespace {

constexpr double kRidgeLambda = 1e-8;

double subset_mean(const std::vector<double>& y, const std::vector<int>& rows) {
    double s = 0.0;
    for (int r : rows) s += y[r];
    return s / static_cast<double>(rows.size());
}

struct Grower {
    const std::vector<const std::vector<double>*>& cols;
    const std::vector<double>& y;
    int min_leaf;
    std::vector<TreeNode>& nodes;

    int grow(std::vector<int>& rows) {
        const int idx = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[idx].value = subset_mean(y, rows);

        const int m = static_cast<int>(rows.size());
        if (m < 2 * min_leaf) return idx;

        int best_f = -1, best_pos = -1;
        double best_sse = std::numeric_limits<double>::infinity();
        double best_split = 0.0;
        std::vector<int> sorted = rows;
        std::vector<int> best_sorted;
        for (std::size_t f = 0; f < cols.size(); ++f) {
            const std::vector<double>& x = *cols[f];
            std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
                if (x[a] != x[b]) return x[a] < x[b];
                return a < b;
            });
            double sy = 0.0, sy2 = 0.0, ty = 0.0, ty2 = 0.0;
            for (int r : sorted) {
                ty += y[r];
                ty2 += y[r] * y[r];
            }
            for (int i = 1; i < m; ++i) {
                const int r = sorted[i - 1];
                sy += y[r];
                sy2 += y[r] * y[r];
                if (i < min_leaf || m - i < min_leaf) continue;
                if (x[sorted[i - 1]] == x[sorted[i]]) continue;
                const double right_n = static_cast<double>(m - i);
                const double sse = (sy2 - sy * sy / i) +
                                   ((ty2 - sy2) - (ty - sy) * (ty - sy) / right_n);
                if (sse < best_sse) {
                    best_sse = sse;
                    best_f = static_cast<int>(f);
                    best_pos = i;
                    best_split = 0.5 * (x[sorted[i - 1]] + x[sorted[i]]);
                    best_sorted = sorted;
                }
            }
        }
        if (best_f < 0) return idx;

        std::vector<int> left_rows(best_sorted.begin(), best_sorted.begin() + best_pos);
        std::vector<int> right_rows(best_sorted.begin() + best_pos, best_sorted.end());
        const int l = grow(left_rows);
        const int r = grow(right_rows);
        nodes[idx].feature = best_f;
        nodes[idx].split = best_split;
        nodes[idx].left = l;
        nodes[idx].right = r;
        return idx;
    }
};

// Reduced error pruning: collapse any subtree whose leaf replacement does
// not raise holdout squared error. Nodes the holdout never reaches (empty
// rows) collapse as well.
double prune_node(TreeModel& tree, int idx,
                  const std::vector<const std::vector<double>*>& cols,
                  const std::vector<double>& y, const std::vector<int>& rows) {
    TreeNode& node = tree.nodes[idx];
    double leaf_sse = 0.0;
    for (int r : rows) {
        const double d = y[r] - node.value;
        leaf_sse += d * d;
    }
    if (node.left < 0) return leaf_sse;

    std::vector<int> lrows, rrows;
    for (int r : rows) {
        if ((*cols[node.feature])[r] <= node.split)
            lrows.push_back(r);
        else
            rrows.push_back(r);
    }
    const double subtree_sse = prune_node(tree, node.left, cols, y, lrows) +
                               prune_node(tree, node.right, cols, y, rrows);
    if (leaf_sse <= subtree_sse) {
        node.feature = -1;
        node.left = -1;
        node.right = -1;
        return leaf_sse;
    }
    return subtree_sse;
}

}  // namespace

std::vector<double> feature_row(const Dataset& ds, int t) {
    std::vector<double> row;
    row.reserve(ds.feature_ids().size());
    for (int id : ds.feature_ids()) row.push_back(ds.feature(id)[t]);
    return row;
}

LinearModel fit_linear(const Dataset& train) {
    const int n = train.n_samples();
    const int p = train.n_features();

    Eigen::MatrixXd A(n, p + 1);
    Eigen::VectorXd b(n);
    A.col(0).setOnes();
    for (int j = 0; j < p; ++j) {
        const std::vector<double>& col = train.feature(train.feature_ids()[j]);
        for (int i = 0; i < n; ++i) A(i, j + 1) = col[i];
    }
    for (int i = 0; i < n; ++i) b(i) = train.outcome()[i];

    LinearModel model;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd coef;
    if (n > p + 1 && qr.rank() == p + 1) {
        coef = qr.solve(b);
    } else {
        Eigen::MatrixXd gram = A.transpose() * A;
        gram.diagonal().array() += kRidgeLambda;
        coef = gram.ldlt().solve(A.transpose() * b);
        model.regularized = true;
    }
    model.beta0 = coef(0);
    model.betas.resize(p);
    for (int j = 0; j < p; ++j) model.betas[j] = coef(j + 1);
    return model;
}

double predict_linear(const LinearModel& model, const std::vector<double>& x) {
    if (x.size() != model.betas.size())
        throw InvalidArgument("feature vector length does not match linear model");
    double v = model.beta0;
    for (std::size_t j = 0; j < x.size(); ++j) v += model.betas[j] * x[j];
    return v;
}

KnnModel fit_knn(const Dataset& train, int k) {
    if (k < 1 || k > train.n_samples())
        throw InvalidArgument("k must lie in [1, n_samples]");
    KnnModel model;
    model.k = k;
    model.train_x.reserve(train.n_samples());
    for (int t = 0; t < train.n_samples(); ++t) model.train_x.push_back(feature_row(train, t));
    model.train_y = train.outcome();
    return model;
}

double predict_knn(const KnnModel& model, const std::vector<double>& x) {
    const int n = static_cast<int>(model.train_x.size());
    if (n == 0) throw InvalidArgument("empty KNN model");
    if (x.size() != model.train_x[0].size())
        throw InvalidArgument("feature vector length does not match KNN model");

    std::vector<std::pair<double, int>> dist(n);
    for (int i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - model.train_x[i][j];
            d2 += d * d;
        }
        dist[i] = {d2, i};
    }
    std::sort(dist.begin(), dist.end());
    double sum = 0.0;
    for (int i = 0; i < model.k; ++i) sum += model.train_y[dist[i].second];
    return sum / static_cast<double>(model.k);
}

TreeModel fit_tree(const Dataset& train, double prune, int min_leaf, std::uint64_t seed) {
    if (min_leaf < 1) throw InvalidArgument("min_leaf must be at least 1");
    if (!(prune > 0.0 && prune < 0.5)) throw InvalidArgument("prune fraction must lie in (0, 0.5)");

    const int n = train.n_samples();
    std::vector<const std::vector<double>*> cols;
    for (int id : train.feature_ids()) cols.push_back(&train.feature(id));
    const std::vector<double>& y = train.outcome();

    TreeModel tree;
    tree.min_leaf = min_leaf;

    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (n < 2 * min_leaf) {
        TreeNode leaf;
        leaf.value = subset_mean(y, all);
        tree.nodes.push_back(leaf);
        return tree;
    }

    Rng rng(derive_seed(seed, /*stream=*/0x7e));
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(all[i], all[j]);
    }
    const int n_holdout = static_cast<int>(prune * n);
    std::vector<int> grow_rows(all.begin(), all.end() - n_holdout);
    std::vector<int> holdout(all.end() - n_holdout, all.end());
    std::sort(grow_rows.begin(), grow_rows.end());
    std::sort(holdout.begin(), holdout.end());

    Grower grower{cols, y, min_leaf, tree.nodes};
    grower.grow(grow_rows);
    if (!holdout.empty()) prune_node(tree, 0, cols, y, holdout);
    return tree;
}

double predict_tree(const TreeModel& model, const std::vector<double>& x) {
    if (model.nodes.empty()) throw InvalidArgument("empty tree model");
    int idx = 0;
    while (model.nodes[idx].left >= 0) {
        const TreeNode& node = model.nodes[idx];
        idx = x[node.feature] <= node.split ? node.left : node.right;
    }
    return model.nodes[idx].value;
}

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) throw InvalidArgument("prediction/truth length mismatch");
    if (pred.empty()) throw InvalidArgument("empty prediction vector");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::fabs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) throw InvalidArgument("prediction/truth length mismatch");
    if (pred.empty()) throw InvalidArgument("empty prediction vector");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

}  // namespace catastrank
