#include "catastrank/cusp_ranker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "catastrank/errors.hpp"
#include "catastrank/parallel.hpp"
#include "catastrank/rng.hpp"

namespace catastrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_ordering(const RankingTable& rt) {
    const std::size_t n_cand = rt.entries.empty() ? 0 : rt.entries.size() - 1;
    bool all_positive = true;
    for (std::size_t i = 0; i < n_cand; ++i)
        all_positive = all_positive && rt.entries[i].aic > 0.0;
    if (!all_positive) return;
    // Reciprocal is order-reversing on positives: ascending AIC must equal
    // descending rank_score.
    for (std::size_t i = 1; i < n_cand; ++i)
        if (rt.entries[i - 1].rank_score < rt.entries[i].rank_score)
            throw Error("ranking table ordering violates the reciprocal relation");
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double parse_cell(const std::string& s, int row) {
    if (s == "n/a") return kNan;
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        std::ostringstream msg;
        msg << "bad numeric cell '" << s << "' at row " << row;
        throw CsvError(msg.str());
    }
    return v;
}

}  // namespace

RankingTable rank_features(const Dataset& ds, int n_f, double t, int asymmetry,
                           std::uint64_t seed, int threads, const FitOptions& options) {
    const std::vector<int>& ids = ds.feature_ids();
    const int n = static_cast<int>(ids.size());
    if (n < 2) throw InvalidArgument("ranking needs at least 2 features");
    if (asymmetry == 0) asymmetry = ids.back();
    if (!ds.has_feature(asymmetry))
        throw InvalidArgument("unknown asymmetry feature id " + std::to_string(asymmetry));
    if (n_f < 1 || n_f >= n)
        throw InvalidArgument("n_f must lie in [1, number of features)");
    if (t < 0.0) throw InvalidArgument("threshold must be non-negative");

    std::vector<int> candidates;
    for (int id : ids)
        if (id != asymmetry) candidates.push_back(id);

    std::vector<double> aics(candidates.size(), kInf);
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        CuspRegressionSpec spec;
        spec.alpha_cols = {asymmetry};
        spec.beta_cols = {candidates[i]};
        try {
            const CuspFit f =
                fit(ds, spec, std::nullopt,
                    derive_seed(seed, 0xf17, static_cast<std::uint64_t>(candidates[i])), options);
            if (std::isfinite(f.aic)) aics[i] = f.aic;
        } catch (const Error&) {
            // recorded as aic = +inf, rank 0
        }
    });

    bool any_ok = false;
    for (double a : aics) any_ok = any_ok || std::isfinite(a);
    if (!any_ok) throw FitError("every per-feature cusp fit failed");

    RankingTable rt;
    rt.threshold_t = t;
    rt.n_requested = n_f;
    rt.asymmetry_feature = asymmetry;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        RankEntry e;
        e.feature_id = candidates[i];
        e.aic = aics[i];
        e.rank_score = std::isinf(aics[i]) ? 0.0 : 1.0 / aics[i];
        rt.entries.push_back(e);
    }
    std::sort(rt.entries.begin(), rt.entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.aic != b.aic) return a.aic < b.aic;
        return a.feature_id < b.feature_id;
    });

    int kept = 0;
    for (RankEntry& e : rt.entries) {
        const bool eliminated = e.aic > 0.0 && e.rank_score <= t;
        if (!eliminated && !std::isinf(e.aic) && kept < n_f) {
            e.kept = true;
            ++kept;
        }
    }

    RankEntry asym;
    asym.feature_id = asymmetry;
    asym.aic = kNan;
    asym.rank_score = kNan;
    rt.entries.push_back(asym);

    check_ordering(rt);
    return rt;
}

std::vector<int> kept_ids(const RankingTable& rt) {
    std::vector<int> ids;
    for (const RankEntry& e : rt.entries)
        if (e.kept) ids.push_back(e.feature_id);
    return ids;
}

std::vector<int> priority_ids(const RankingTable& rt) {
    std::vector<int> ids;
    for (const RankEntry& e : rt.entries)
        if (e.feature_id != rt.asymmetry_feature) ids.push_back(e.feature_id);
    ids.push_back(rt.asymmetry_feature);
    return ids;
}

void export_ranking(const RankingTable& rt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "attribute_id,aic,rank,kept\n";
    for (const RankEntry& e : rt.entries)
        out << e.feature_id << ',' << format_cell(e.aic) << ',' << format_cell(e.rank_score)
            << ',' << (e.kept ? "true" : "false") << '\n';
    if (!out) throw IoError("write failed for " + path);
}

RankingTable load_ranking(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "attribute_id,aic,rank,kept")
        throw CsvError("unexpected ranking header in " + path);

    RankingTable rt;
    int row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        cells.push_back(cur);
        if (cells.size() != 4) {
            std::ostringstream msg;
            msg << "ranking row " << row << " has " << cells.size() << " cells, expected 4";
            throw CsvError(msg.str());
        }
        RankEntry e;
        e.feature_id = static_cast<int>(parse_cell(cells[0], row));
        e.aic = parse_cell(cells[1], row);
        e.rank_score = parse_cell(cells[2], row);
        e.kept = cells[3] == "true";
        if (std::isnan(e.aic)) rt.asymmetry_feature = e.feature_id;
        rt.entries.push_back(e);
    }
    if (rt.entries.empty()) throw CsvError("empty ranking file " + path);
    rt.n_requested = static_cast<int>(kept_ids(rt).size());
    return rt;
}

}  // namespace catastrank
