#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "catastrank/cusp_fit.hpp"
#include "catastrank/dataset.hpp"

namespace catastrank {

struct ExperimentConfig {
    std::string input;
    std::string outcome;  // column name or 1-based index; empty = last column
    std::string ranker = "cusp";
    std::vector<std::string> regressors = {"linear", "knn", "tree"};
    std::vector<int> feature_counts;  // strictly decreasing
    int n_folds = 10;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string ranking_file;  // reuse a previously exported ranking

    int asymmetry = 0;  // 0 = last feature id
    double threshold = 0.0;

    int relief_m = 0;  // 0 = exhaustive (one pass over every sample)
    double relief_tau = 0.0;
    int relief_bins = 2;

    int knn_k = 3;
    int tree_min_leaf = 5;
    double tree_holdout = 0.2;

    FitOptions fit_options;
};

struct EvalCell {
    std::string ranker;
    std::string regressor;
    int feature_count = 0;
    double mae = 0.0;
    double rmse = 0.0;
    bool ok = false;
    std::string reason;  // failure cause when !ok
};

struct EvalReport {
    std::string version;
    std::string input_path;
    std::string input_hash;  // FNV-1a 64 of the input bytes, hex
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<std::string> rankers;     // one label, or two in comparison mode
    std::vector<std::string> regressors;  // run order
    std::vector<int> feature_counts;      // as configured
    int n_folds = 0;
    std::uint64_t seed = 0;
    std::vector<EvalCell> cells;  // ranker-major, then regressor, then count
    bool partial = false;         // some cell failed
};

// Ranks once on the full dataset, then sweeps top-c subsets through k-fold
// cross-validated regressors. Fold assignments are fixed across all cells.
// Cell failures are recorded in place and mark the report partial.
EvalReport run_experiment(const ExperimentConfig& cfg);

// Side-by-side run of two configs sharing input, outcome, folds, seed,
// regressors and feature counts.
EvalReport compare_rankers(const ExperimentConfig& a, const ExperimentConfig& b);

// The report body: run-metadata comments plus one CSV row per cell. Identical
// configs and seed produce byte-identical output regardless of threads.
void write_report_csv(const EvalReport& report, std::ostream& out);

// Aligned text table, one row per (regressor, feature_count); comparison
// reports add per-ranker columns and a winner column (lower MAE).
void write_report_table(const EvalReport& report, std::ostream& out);

// One tab-separated file per regressor (plot_<regressor>.tsv) with rows
// sorted ascending by feature_count.
void emit_plot_data(const EvalReport& report, const std::string& dir);

}  // namespace catastrank
