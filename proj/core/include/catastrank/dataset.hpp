#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace catastrank {

/// Per-column min/max recorded before scaling to [0, 1].
struct NormMeta {
    double min = 0.0;
    double max = 1.0;
    bool constant = false;  // max == min at load time
};

struct FoldPlan {
    int n_folds = 0;
    std::vector<int> assignments;  // per-sample fold id in [0, n_folds)
    std::uint64_t seed = 0;

    std::vector<int> fold_sizes() const;
};

enum class NormalizeMode {
    MinMax,  // scale every column to [0, 1], recording min/max
    None,    // keep values as given; NormMeta stays the identity map
};

/// Immutable column-oriented numeric table with one designated outcome
/// column. Feature columns carry stable 1-based attribute ids that survive
/// select_features(), so sub-tables keep the original numbering.
class Dataset {
public:
    /// Loads a comma-separated table (header row, '.' decimals, no quoting)
    /// and min-max normalizes every column. `outcome` is a column name or a
    /// 1-based column index; empty selects the last column.
    static Dataset load_csv(const std::string& path, const std::string& outcome = "");

    /// Builds a dataset from in-memory columns. `outcome_col` indexes into
    /// `columns`. NormalizeMode::None keeps raw values (used for synthetic
    /// data where the state variable must not be rescaled).
    static Dataset from_columns(std::vector<std::string> names,
                                std::vector<std::vector<double>> columns,
                                int outcome_col,
                                NormalizeMode mode = NormalizeMode::MinMax);

    int n_samples() const { return n_samples_; }
    int n_features() const { return static_cast<int>(feature_ids_.size()); }

    /// Attribute ids of the non-outcome columns, in column order.
    const std::vector<int>& feature_ids() const { return feature_ids_; }
    bool has_feature(int id) const;

    const std::vector<double>& feature(int id) const;
    const std::string& feature_name(int id) const;
    const NormMeta& feature_norm(int id) const;

    const std::vector<double>& outcome() const;
    const std::string& outcome_name() const;
    const NormMeta& outcome_norm() const;

    /// Inverse of the load-time normalization for one column's meta.
    static double denormalize(const NormMeta& m, double v) {
        return m.constant ? m.min : m.min + v * (m.max - m.min);
    }

    /// New dataset holding the outcome plus exactly the kept features, in
    /// `keep` order. Ids and names are preserved.
    Dataset select_features(const std::vector<int>& keep) const;

    /// New dataset restricted to the given sample indices, in `rows` order.
    /// Normalization metadata is carried over unchanged (no re-scaling).
    Dataset subset_rows(const std::vector<int>& rows) const;

    /// Seeded random partition into n_folds groups whose sizes differ by at
    /// most one.
    FoldPlan make_folds(int n_folds, std::uint64_t seed) const;

private:
    struct Column {
        std::string name;
        int id = 0;  // 0 for the outcome column
        std::vector<double> values;
        NormMeta norm;
    };

    Dataset() = default;
    void index_features();
    const Column& col_by_id(int id) const;

    std::vector<Column> cols_;
    int outcome_idx_ = -1;
    int n_samples_ = 0;
    std::vector<int> feature_ids_;
};

}  // namespace catastrank
