#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catastrank/cusp_model.hpp"
#include "catastrank/cusp_ranker.hpp"
#include "catastrank/dataset.hpp"
#include "catastrank/errors.hpp"
#include "catastrank/harness.hpp"
#include "catastrank/relief.hpp"
#include "catastrank/version.hpp"

namespace {

using catastrank::Dataset;
using catastrank::ExperimentConfig;

std::string env_name_of(std::string name) {
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    for (char& c : name) c = (c == '-') ? '_' : static_cast<char>(std::toupper(c));
    return "CATASTRANK_" + name;
}

template <typename T>
CLI::Option* opt(CLI::App* cmd, const std::string& name, T& var, const std::string& desc) {
    return cmd->add_option(name, var, desc)->envname(env_name_of(name));
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void echo_config(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::cerr << "# effective config\n";
    for (const auto& [k, v] : kv) std::cerr << k << '=' << v << '\n';
}

struct CommonFlags {
    std::string input;
    std::string outcome;
    std::uint64_t seed = 42;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_input = true) {
    auto* in = opt(cmd, "--input", f.input, "input CSV (header row, numeric cells)");
    if (need_input) in->required();
    opt(cmd, "--outcome", f.outcome, "outcome column name or 1-based index (default: last)");
    opt(cmd, "--seed", f.seed, "master RNG seed");
    opt(cmd, "--threads", f.threads, "worker threads (0 = hardware default)");
}

struct CuspFlags {
    int asymmetry = 0;
    double threshold = 0.0;
    int multistart = 5;
    double perturb_scale = 0.5;
};

void add_cusp(CLI::App* cmd, CuspFlags& f) {
    opt(cmd, "--asymmetry", f.asymmetry, "asymmetry covariate feature id (0 = last feature)");
    opt(cmd, "--threshold", f.threshold, "rank-score elimination threshold t");
    opt(cmd, "--multistart", f.multistart, "optimizer starts per fit");
    opt(cmd, "--perturb-scale", f.perturb_scale, "perturbation scale for restarts");
}

struct ReliefFlags {
    std::string m = "all";
    double tau = 0.0;
    int bins = 2;
};

void add_relief(CLI::App* cmd, ReliefFlags& f) {
    opt(cmd, "--m", f.m, "sampled triplet count, or 'all' for one pass per sample");
    opt(cmd, "--tau", f.tau, "relevancy threshold in [0, 1]");
    opt(cmd, "--bins", f.bins, "equal-frequency outcome bins defining classes");
}

int parse_relief_m(const std::string& m, int n_samples) {
    if (m == "all") return n_samples;
    try {
        return std::stoi(m);
    } catch (const std::exception&) {
        throw catastrank::InvalidArgument("--m must be a positive integer or 'all'");
    }
}

std::vector<std::pair<std::string, std::string>> common_echo(const CommonFlags& f) {
    return {{"input", f.input},
            {"outcome", f.outcome.empty() ? "(last column)" : f.outcome},
            {"seed", std::to_string(f.seed)},
            {"threads", f.threads == 0 ? "(hardware default)" : std::to_string(f.threads)}};
}

int run_rank(const CommonFlags& common, const CuspFlags& cusp, int top, const std::string& out) {
    auto echo = common_echo(common);
    echo.emplace_back("top", std::to_string(top));
    echo.emplace_back("threshold", fmt6(cusp.threshold));
    echo.emplace_back("asymmetry", cusp.asymmetry == 0 ? "(last feature)"
                                                       : std::to_string(cusp.asymmetry));
    echo.emplace_back("multistart", std::to_string(cusp.multistart));
    echo.emplace_back("out", out.empty() ? "(stdout)" : out);
    echo_config(echo);

    const Dataset ds = Dataset::load_csv(common.input, common.outcome);
    catastrank::FitOptions options;
    options.multistart = cusp.multistart;
    options.perturb_scale = cusp.perturb_scale;
    const catastrank::RankingTable rt = catastrank::rank_features(
        ds, top, cusp.threshold, cusp.asymmetry, common.seed, common.threads, options);

    if (out.empty()) {
        std::ostringstream buf;
        buf << "attribute_id,aic,rank,kept\n";
        for (const auto& e : rt.entries) {
            buf << e.feature_id << ',';
            if (std::isnan(e.aic))
                buf << "n/a,n/a,";
            else if (std::isinf(e.aic))
                buf << "inf," << fmt6(e.rank_score) << ',';
            else
                buf << fmt6(e.aic) << ',' << fmt6(e.rank_score) << ',';
            buf << (e.kept ? "true" : "false") << '\n';
        }
        std::cout << buf.str();
    } else {
        catastrank::export_ranking(rt, out);
    }
    return 0;
}

int run_relief(const CommonFlags& common, const ReliefFlags& rf, const std::string& out) {
    auto echo = common_echo(common);
    echo.emplace_back("m", rf.m);
    echo.emplace_back("tau", fmt6(rf.tau));
    echo.emplace_back("bins", std::to_string(rf.bins));
    echo.emplace_back("out", out.empty() ? "(stdout)" : out);
    echo_config(echo);

    const Dataset ds = Dataset::load_csv(common.input, common.outcome);
    const int m = parse_relief_m(rf.m, ds.n_samples());
    const catastrank::ReliefWeights rw =
        catastrank::relief_rank(ds, m, rf.tau, rf.bins, common.seed);

    if (out.empty()) {
        const std::vector<int> order = catastrank::ranked_ids(rw);
        std::cout << "attribute_id,weight,relevant\n";
        for (int id : order) {
            for (std::size_t i = 0; i < rw.feature_ids.size(); ++i)
                if (rw.feature_ids[i] == id)
                    std::cout << id << ',' << fmt6(rw.weights[i]) << ','
                              << (rw.relevant[i] ? "true" : "false") << '\n';
        }
    } else {
        catastrank::export_relief(rw, out);
    }
    return 0;
}

int run_select(const CommonFlags& common, const std::string& ranking, const std::string& features,
               int top, const std::string& out) {
    auto echo = common_echo(common);
    echo.emplace_back("ranking", ranking.empty() ? "(none)" : ranking);
    echo.emplace_back("features", features.empty() ? "(from ranking)" : features);
    echo.emplace_back("top", std::to_string(top));
    echo.emplace_back("out", out.empty() ? "(stdout)" : out);
    echo_config(echo);

    const Dataset ds = Dataset::load_csv(common.input, common.outcome);

    std::vector<int> keep;
    if (!features.empty()) {
        std::stringstream ss(features);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                keep.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw catastrank::InvalidArgument("--features must be comma-separated ids");
            }
        }
    } else if (!ranking.empty()) {
        const catastrank::RankingTable rt = catastrank::load_ranking(ranking);
        if (top > 0) {
            const std::vector<int> prio = catastrank::priority_ids(rt);
            if (top > static_cast<int>(prio.size()))
                throw catastrank::InvalidArgument("--top exceeds ranked feature count");
            keep.assign(prio.begin(), prio.begin() + top);
        } else {
            keep = catastrank::kept_ids(rt);
        }
    } else {
        throw catastrank::InvalidArgument("select needs --ranking or --features");
    }

    const Dataset sub = ds.select_features(keep);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw catastrank::IoError("cannot open " + out + " for writing");
        os = &file;
    }
    char buf[64];
    for (int id : sub.feature_ids()) *os << sub.feature_name(id) << ',';
    *os << sub.outcome_name() << '\n';
    for (int t = 0; t < sub.n_samples(); ++t) {
        for (int id : sub.feature_ids()) {
            std::snprintf(buf, sizeof(buf), "%.17g",
                          Dataset::denormalize(sub.feature_norm(id), sub.feature(id)[t]));
            *os << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g",
                      Dataset::denormalize(sub.outcome_norm(), sub.outcome()[t]));
        *os << buf << '\n';
    }
    if (!*os) throw catastrank::IoError("write failed");
    return 0;
}

struct EvalFlags {
    std::vector<int> counts;
    int folds = 10;
    std::vector<std::string> regressors = {"linear", "knn", "tree"};
    int knn_k = 3;
    int min_leaf = 5;
    double tree_holdout = 0.2;
    std::string out;
    std::string table;
    std::string plot_dir;
};

void add_eval(CLI::App* cmd, EvalFlags& f) {
    opt(cmd, "--counts", f.counts, "descending feature counts to sweep, e.g. 30,25,20")
        ->required()
        ->delimiter(',');
    opt(cmd, "--folds", f.folds, "cross-validation folds");
    opt(cmd, "--regressors", f.regressors, "subset of linear,knn,tree")->delimiter(',');
    opt(cmd, "--knn-k", f.knn_k, "neighbor count for knn");
    opt(cmd, "--min-leaf", f.min_leaf, "minimum samples per tree leaf");
    opt(cmd, "--tree-holdout", f.tree_holdout, "holdout fraction for tree pruning");
    opt(cmd, "--out", f.out, "report CSV path (default: stdout)");
    opt(cmd, "--table", f.table, "also write an aligned text table here");
    opt(cmd, "--plot-dir", f.plot_dir, "also write per-regressor plot data here");
}

ExperimentConfig build_config(const CommonFlags& common, const EvalFlags& eval,
                              const std::string& ranker, const CuspFlags& cusp,
                              const ReliefFlags& relief, const std::string& ranking_file) {
    ExperimentConfig cfg;
    cfg.input = common.input;
    cfg.outcome = common.outcome;
    cfg.ranker = ranker;
    cfg.regressors = eval.regressors;
    cfg.feature_counts = eval.counts;
    cfg.n_folds = eval.folds;
    cfg.seed = common.seed;
    cfg.threads = common.threads;
    cfg.ranking_file = ranking_file;
    cfg.asymmetry = cusp.asymmetry;
    cfg.threshold = cusp.threshold;
    cfg.fit_options.multistart = cusp.multistart;
    cfg.fit_options.perturb_scale = cusp.perturb_scale;
    cfg.relief_m = relief.m == "all" ? 0 : parse_relief_m(relief.m, 0);
    cfg.relief_tau = relief.tau;
    cfg.relief_bins = relief.bins;
    cfg.knn_k = eval.knn_k;
    cfg.tree_min_leaf = eval.min_leaf;
    cfg.tree_holdout = eval.tree_holdout;
    return cfg;
}

int emit_report(const catastrank::EvalReport& report, const EvalFlags& eval) {
    if (eval.out.empty()) {
        catastrank::write_report_csv(report, std::cout);
    } else {
        std::ofstream file(eval.out);
        if (!file) throw catastrank::IoError("cannot open " + eval.out + " for writing");
        catastrank::write_report_csv(report, file);
        if (!file) throw catastrank::IoError("write failed for " + eval.out);
    }
    if (!eval.table.empty()) {
        std::ofstream file(eval.table);
        if (!file) throw catastrank::IoError("cannot open " + eval.table + " for writing");
        catastrank::write_report_table(report, file);
        if (!file) throw catastrank::IoError("write failed for " + eval.table);
    }
    if (!eval.plot_dir.empty()) catastrank::emit_plot_data(report, eval.plot_dir);
    if (report.partial) {
        std::cerr << "warning: some cells failed; report is partial\n";
        return 2;
    }
    return 0;
}

int run_eval(const CommonFlags& common, const EvalFlags& eval, const std::string& ranker,
             const CuspFlags& cusp, const ReliefFlags& relief, const std::string& ranking_file) {
    const ExperimentConfig cfg = build_config(common, eval, ranker, cusp, relief, ranking_file);
    auto echo = common_echo(common);
    echo.emplace_back("ranker", cfg.ranker);
    echo.emplace_back("counts", [&] {
        std::ostringstream s;
        for (std::size_t i = 0; i < cfg.feature_counts.size(); ++i)
            s << (i ? "," : "") << cfg.feature_counts[i];
        return s.str();
    }());
    echo.emplace_back("folds", std::to_string(cfg.n_folds));
    echo_config(echo);

    return emit_report(catastrank::run_experiment(cfg), eval);
}

int run_compare(const CommonFlags& common, const EvalFlags& eval, const std::string& ranker_a,
                const std::string& ranker_b, const CuspFlags& cusp, const ReliefFlags& relief) {
    const ExperimentConfig cfg_a = build_config(common, eval, ranker_a, cusp, relief, "");
    const ExperimentConfig cfg_b = build_config(common, eval, ranker_b, cusp, relief, "");
    auto echo = common_echo(common);
    echo.emplace_back("ranker_a", ranker_a);
    echo.emplace_back("ranker_b", ranker_b);
    echo.emplace_back("folds", std::to_string(eval.folds));
    echo_config(echo);

    return emit_report(catastrank::compare_rankers(cfg_a, cfg_b), eval);
}

int run_diag(double alpha, double beta) {
    echo_config({{"alpha", fmt6(alpha)}, {"beta", fmt6(beta)}});
    const catastrank::CuspParams p{alpha, beta};
    const catastrank::EquilibriumSet eq = catastrank::equilibria(p);

    std::cout << "discriminant=" << fmt6(eq.discriminant) << '\n';
    std::cout << "roots=";
    for (std::size_t i = 0; i < eq.roots.size(); ++i)
        std::cout << (i ? "," : "") << fmt6(eq.roots[i]);
    std::cout << '\n' << "stability=";
    for (std::size_t i = 0; i < eq.stability.size(); ++i)
        std::cout << (i ? "," : "")
                  << (eq.stability[i] == catastrank::Stability::stable ? "stable" : "unstable");
    std::cout << '\n';
    std::cout << "log_normalizer=" << fmt6(catastrank::log_normalizer(p)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature ranking by stochastic cusp-catastrophe model fit"};
    app.set_version_flag("--version", CATASTRANK_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "config file with [subcommand] sections")
        ->envname(env_name_of("--config"));

    CommonFlags common;
    CuspFlags cusp;
    ReliefFlags relief;
    EvalFlags eval;
    int top = 0;
    std::string out, ranking_file, features;
    std::string ranker = "cusp", ranker_a = "cusp", ranker_b = "relief";
    double alpha = 0.0, beta = 0.0;

    CLI::App* rank = app.add_subcommand("rank", "rank features by inverse AIC of per-feature cusp fits");
    add_common(rank, common);
    add_cusp(rank, cusp);
    opt(rank, "--top", top, "number of features to keep")->required();
    opt(rank, "--out", out, "ranking CSV path (default: stdout)");

    CLI::App* rel = app.add_subcommand("relief", "rank features with the RELIEF baseline");
    add_common(rel, common);
    add_relief(rel, relief);
    opt(rel, "--out", out, "weights CSV path (default: stdout)");

    CLI::App* sel = app.add_subcommand("select", "write the data restricted to chosen features");
    add_common(sel, common);
    opt(sel, "--ranking", ranking_file, "ranking CSV produced by rank/relief");
    opt(sel, "--features", features, "explicit comma-separated feature ids");
    opt(sel, "--top", top, "take the best <n> of --ranking instead of its kept set");
    opt(sel, "--out", out, "output CSV path (default: stdout)");

    CLI::App* ev = app.add_subcommand("eval", "cross-validated error sweep over top-c feature sets");
    add_common(ev, common);
    add_cusp(ev, cusp);
    add_relief(ev, relief);
    add_eval(ev, eval);
    opt(ev, "--ranker", ranker, "cusp or relief");
    opt(ev, "--ranking", ranking_file, "reuse a ranking CSV instead of re-ranking");

    CLI::App* cmp = app.add_subcommand("compare", "side-by-side sweep of two rankers");
    add_common(cmp, common);
    add_cusp(cmp, cusp);
    add_relief(cmp, relief);
    add_eval(cmp, eval);
    opt(cmp, "--ranker-a", ranker_a, "first ranker");
    opt(cmp, "--ranker-b", ranker_b, "second ranker");

    CLI::App* diag = app.add_subcommand("cusp-diag", "print discriminant, equilibria and normalizer");
    opt(diag, "--alpha", alpha, "asymmetry control")->required();
    opt(diag, "--beta", beta, "bifurcation control");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 64;
    }

    try {
        if (rank->parsed()) return run_rank(common, cusp, top, out);
        if (rel->parsed()) return run_relief(common, relief, out);
        if (sel->parsed()) return run_select(common, ranking_file, features, top, out);
        if (ev->parsed()) return run_eval(common, eval, ranker, cusp, relief, ranking_file);
        if (cmp->parsed()) return run_compare(common, eval, ranker_a, ranker_b, cusp, relief);
        if (diag->parsed()) return run_diag(alpha, beta);
    } catch (const catastrank::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
