#include "catastrank/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "catastrank/cusp_ranker.hpp"
#include "catastrank/errors.hpp"
#include "catastrank/parallel.hpp"
#include "catastrank/regress.hpp"
#include "catastrank/relief.hpp"
#include "catastrank/rng.hpp"
#include "catastrank/version.hpp"

namespace catastrank {
namespace {

std::string fnv1a_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string fmt6(double v) {
    if (!std::isfinite(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

std::string join_strs(const std::vector<std::string>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

void validate_config(const ExperimentConfig& cfg, int n_features, int n_samples) {
    if (cfg.ranker != "cusp" && cfg.ranker != "relief")
        throw InvalidArgument("unknown ranker '" + cfg.ranker + "'");
    if (cfg.regressors.empty()) throw InvalidArgument("no regressors configured");
    std::set<std::string> seen;
    for (const std::string& r : cfg.regressors) {
        if (r != "linear" && r != "knn" && r != "tree")
            throw InvalidArgument("unknown regressor '" + r + "'");
        if (!seen.insert(r).second) throw InvalidArgument("duplicate regressor '" + r + "'");
    }
    if (cfg.feature_counts.empty()) throw InvalidArgument("feature_counts must be non-empty");
    for (std::size_t i = 0; i < cfg.feature_counts.size(); ++i) {
        const int c = cfg.feature_counts[i];
        if (c < 1 || c > n_features)
            throw InvalidArgument("feature count " + std::to_string(c) + " out of range");
        if (i > 0 && cfg.feature_counts[i] >= cfg.feature_counts[i - 1])
            throw InvalidArgument("feature_counts must be strictly decreasing");
    }
    if (cfg.n_folds < 2 || cfg.n_folds > n_samples)
        throw InvalidArgument("n_folds must lie in [2, n_samples]");
}

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("outcome", cfg.outcome.empty() ? "(last column)" : cfg.outcome);
    kv.emplace_back("ranker", cfg.ranker);
    kv.emplace_back("regressors", join_strs(cfg.regressors));
    kv.emplace_back("feature_counts", join_ints(cfg.feature_counts));
    kv.emplace_back("n_folds", std::to_string(cfg.n_folds));
    kv.emplace_back("seed", std::to_string(cfg.seed));
    if (!cfg.ranking_file.empty()) kv.emplace_back("ranking_file", cfg.ranking_file);
    if (cfg.ranker == "cusp") {
        kv.emplace_back("asymmetry", cfg.asymmetry == 0 ? "(last feature)"
                                                        : std::to_string(cfg.asymmetry));
        kv.emplace_back("threshold", fmt6(cfg.threshold));
        kv.emplace_back("multistart", std::to_string(cfg.fit_options.multistart));
    } else {
        kv.emplace_back("relief_m", cfg.relief_m == 0 ? "all" : std::to_string(cfg.relief_m));
        kv.emplace_back("relief_tau", fmt6(cfg.relief_tau));
        kv.emplace_back("relief_bins", std::to_string(cfg.relief_bins));
    }
    kv.emplace_back("knn_k", std::to_string(cfg.knn_k));
    kv.emplace_back("tree_min_leaf", std::to_string(cfg.tree_min_leaf));
    kv.emplace_back("tree_holdout", fmt6(cfg.tree_holdout));
    return kv;
}

// Priority list: every feature id ordered best-first, used for top-c cuts.
std::vector<int> ranking_priority(const Dataset& ds, const ExperimentConfig& cfg) {
    if (!cfg.ranking_file.empty()) return priority_ids(load_ranking(cfg.ranking_file));
    if (cfg.ranker == "cusp") {
        const int n = ds.n_features();
        const RankingTable rt = rank_features(ds, n - 1, cfg.threshold, cfg.asymmetry, cfg.seed,
                                              cfg.threads, cfg.fit_options);
        return priority_ids(rt);
    }
    const int m = cfg.relief_m == 0 ? ds.n_samples() : cfg.relief_m;
    return ranked_ids(relief_rank(ds, m, cfg.relief_tau, cfg.relief_bins, cfg.seed));
}

EvalCell evaluate_cell(const Dataset& sub, const FoldPlan& folds, const std::string& regressor,
                       const ExperimentConfig& cfg, int count) {
    EvalCell cell;
    cell.ranker = cfg.ranker;
    cell.regressor = regressor;
    cell.feature_count = count;

    const int n = sub.n_samples();
    std::vector<double> pred(n, 0.0);
    for (int f = 0; f < folds.n_folds; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int t = 0; t < n; ++t)
            (folds.assignments[t] == f ? test_rows : train_rows).push_back(t);
        if (test_rows.empty()) continue;
        const Dataset train = sub.subset_rows(train_rows);

        if (regressor == "linear") {
            const LinearModel model = fit_linear(train);
            for (int t : test_rows) pred[t] = predict_linear(model, feature_row(sub, t));
        } else if (regressor == "knn") {
            const KnnModel model = fit_knn(train, cfg.knn_k);
            for (int t : test_rows) pred[t] = predict_knn(model, feature_row(sub, t));
        } else {
            const TreeModel model =
                fit_tree(train, cfg.tree_holdout, cfg.tree_min_leaf,
                         derive_seed(cfg.seed, 0x7265 + static_cast<std::uint64_t>(count),
                                     static_cast<std::uint64_t>(f)));
            for (int t : test_rows) pred[t] = predict_tree(model, feature_row(sub, t));
        }
    }
    cell.mae = mae(pred, sub.outcome());
    cell.rmse = rmse(pred, sub.outcome());
    cell.ok = true;
    return cell;
}

EvalReport run_on(const Dataset& ds, const ExperimentConfig& cfg) {
    validate_config(cfg, ds.n_features(), ds.n_samples());

    EvalReport report;
    report.version = version();
    report.input_path = cfg.input;
    report.input_hash = fnv1a_hex(cfg.input);
    report.config_echo = echo_config(cfg);
    report.rankers = {cfg.ranker};
    report.regressors = cfg.regressors;
    report.feature_counts = cfg.feature_counts;
    report.n_folds = cfg.n_folds;
    report.seed = cfg.seed;

    const FoldPlan folds = ds.make_folds(cfg.n_folds, cfg.seed);
    const std::vector<int> priority = ranking_priority(ds, cfg);

    std::vector<Dataset> subsets;
    subsets.reserve(cfg.feature_counts.size());
    for (int c : cfg.feature_counts) {
        std::vector<int> keep(priority.begin(), priority.begin() + c);
        // Canonical column order, so equal top-c sets give bit-equal cells
        // regardless of which ranker produced them.
        std::sort(keep.begin(), keep.end());
        subsets.push_back(ds.select_features(keep));
    }

    const std::size_t n_cells = cfg.regressors.size() * cfg.feature_counts.size();
    report.cells.resize(n_cells);
    parallel_for(n_cells, cfg.threads, [&](std::size_t i) {
        const std::size_t ri = i / cfg.feature_counts.size();
        const std::size_t ci = i % cfg.feature_counts.size();
        EvalCell& cell = report.cells[i];
        try {
            cell = evaluate_cell(subsets[ci], folds, cfg.regressors[ri], cfg,
                                 cfg.feature_counts[ci]);
        } catch (const std::exception& e) {
            cell.ranker = cfg.ranker;
            cell.regressor = cfg.regressors[ri];
            cell.feature_count = cfg.feature_counts[ci];
            cell.ok = false;
            cell.reason = e.what();
        }
    });
    for (const EvalCell& c : report.cells) report.partial = report.partial || !c.ok;
    return report;
}

const EvalCell* find_cell(const EvalReport& r, const std::string& ranker,
                          const std::string& regressor, int count) {
    for (const EvalCell& c : r.cells)
        if (c.ranker == ranker && c.regressor == regressor && c.feature_count == count) return &c;
    return nullptr;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg) {
    const Dataset ds = Dataset::load_csv(cfg.input, cfg.outcome);
    return run_on(ds, cfg);
}

EvalReport compare_rankers(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.input != b.input || a.outcome != b.outcome || a.n_folds != b.n_folds ||
        a.seed != b.seed || a.regressors != b.regressors || a.feature_counts != b.feature_counts)
        throw InvalidArgument(
            "comparison configs must share input, outcome, folds, seed, regressors and counts");

    const Dataset ds = Dataset::load_csv(a.input, a.outcome);
    EvalReport ra = run_on(ds, a);
    EvalReport rb = run_on(ds, b);

    std::string label_a = a.ranker, label_b = b.ranker;
    if (label_a == label_b) {
        label_a += "_a";
        label_b += "_b";
    }
    for (EvalCell& c : ra.cells) c.ranker = label_a;
    for (EvalCell& c : rb.cells) c.ranker = label_b;

    EvalReport merged = std::move(ra);
    merged.rankers = {label_a, label_b};
    merged.partial = merged.partial || rb.partial;
    for (const auto& kv : rb.config_echo) {
        const bool shared = kv.first == "outcome" || kv.first == "regressors" ||
                            kv.first == "feature_counts" || kv.first == "n_folds" ||
                            kv.first == "seed";
        if (!shared) merged.config_echo.emplace_back(label_b + "." + kv.first, kv.second);
    }
    for (auto& kv : merged.config_echo)
        if (kv.first == "ranker") kv.second = label_a + " vs " + label_b;
    merged.cells.insert(merged.cells.end(), rb.cells.begin(), rb.cells.end());
    return merged;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
    out << "# catastrank " << report.version << '\n';
    out << "# input=" << report.input_path << '\n';
    out << "# input_fnv1a=" << report.input_hash << '\n';
    for (const auto& kv : report.config_echo) out << "# " << kv.first << '=' << kv.second << '\n';
    out << "# note=ranking is computed once on the full dataset before cross-validation\n";
    out << "ranker,regressor,feature_count,mae,rmse,folds,seed,status\n";
    for (const EvalCell& c : report.cells) {
        out << c.ranker << ',' << c.regressor << ',' << c.feature_count << ',';
        if (c.ok)
            out << fmt6(c.mae) << ',' << fmt6(c.rmse) << ',' << report.n_folds << ','
                << report.seed << ",ok\n";
        else
            out << "n/a,n/a," << report.n_folds << ',' << report.seed << ",failed:"
                << sanitize(c.reason) << '\n';
    }
}

void write_report_table(const EvalReport& report, std::ostream& out) {
    const bool comparison = report.rankers.size() == 2;
    std::vector<std::vector<std::string>> rows;

    if (!comparison) {
        rows.push_back({"regressor", "features", "mae", "rmse"});
        for (const std::string& reg : report.regressors)
            for (int c : report.feature_counts) {
                const EvalCell* cell = find_cell(report, report.rankers[0], reg, c);
                if (!cell) continue;
                rows.push_back({reg, std::to_string(c),
                                cell->ok ? fmt6(cell->mae) : "failed",
                                cell->ok ? fmt6(cell->rmse) : "failed"});
            }
    } else {
        const std::string& la = report.rankers[0];
        const std::string& lb = report.rankers[1];
        rows.push_back({"regressor", "features", "mae_" + la, "mae_" + lb, "rmse_" + la,
                        "rmse_" + lb, "winner"});
        for (const std::string& reg : report.regressors)
            for (int c : report.feature_counts) {
                const EvalCell* ca = find_cell(report, la, reg, c);
                const EvalCell* cb = find_cell(report, lb, reg, c);
                if (!ca || !cb) continue;
                std::string winner = "n/a";
                if (ca->ok && cb->ok)
                    winner = ca->mae < cb->mae ? la : (cb->mae < ca->mae ? lb : "tie");
                rows.push_back({reg, std::to_string(c),
                                ca->ok ? fmt6(ca->mae) : "failed",
                                cb->ok ? fmt6(cb->mae) : "failed",
                                ca->ok ? fmt6(ca->rmse) : "failed",
                                cb->ok ? fmt6(cb->rmse) : "failed", winner});
            }
    }

    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
    out << "ranker: " << (comparison ? report.rankers[0] + " vs " + report.rankers[1]
                                     : report.rankers[0])
        << "   folds: " << report.n_folds << "   seed: " << report.seed << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << "  ";
            out << std::setw(static_cast<int>(width[j])) << (j == 0 ? std::left : std::right)
                << row[j];
            out << std::right;
        }
        out << '\n';
    }
}

void emit_plot_data(const EvalReport& report, const std::string& dir) {
    if (report.cells.empty()) throw InvalidArgument("empty report");
    std::filesystem::create_directories(dir);

    std::vector<int> counts = report.feature_counts;
    std::sort(counts.begin(), counts.end());

    for (const std::string& reg : report.regressors) {
        const std::string path = dir + "/plot_" + reg + ".tsv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path + " for writing");

        out << "feature_count";
        if (report.rankers.size() == 1) {
            out << "\tmae\trmse";
        } else {
            for (const std::string& rk : report.rankers) out << "\tmae_" << rk;
            for (const std::string& rk : report.rankers) out << "\trmse_" << rk;
        }
        out << '\n';
        for (int c : counts) {
            out << c;
            if (report.rankers.size() == 1) {
                const EvalCell* cell = find_cell(report, report.rankers[0], reg, c);
                out << '\t' << (cell && cell->ok ? fmt6(cell->mae) : "n/a") << '\t'
                    << (cell && cell->ok ? fmt6(cell->rmse) : "n/a");
            } else {
                for (const std::string& rk : report.rankers) {
                    const EvalCell* cell = find_cell(report, rk, reg, c);
                    out << '\t' << (cell && cell->ok ? fmt6(cell->mae) : "n/a");
                }
                for (const std::string& rk : report.rankers) {
                    const EvalCell* cell = find_cell(report, rk, reg, c);
                    out << '\t' << (cell && cell->ok ? fmt6(cell->rmse) : "n/a");
                }
            }
            out << '\n';
        }
        if (!out) throw IoError("write failed for " + path);
    }
}

}  // namespace catastrank
