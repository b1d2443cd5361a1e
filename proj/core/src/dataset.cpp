#include "catastrank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "catastrank/errors.hpp"
#include "catastrank/rng.hpp"

namespace catastrank {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, int row, int col) {
    std::string s = trim(raw);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-numeric cell at row " << row << ", column " << col << " ('" << raw << "')";
        throw CsvError(msg.str());
    }
    return v;
}

}  // namespace

std::vector<int> FoldPlan::fold_sizes() const {
    std::vector<int> sizes(n_folds, 0);
    for (int f : assignments) ++sizes[f];
    return sizes;
}

Dataset Dataset::load_csv(const std::string& path, const std::string& outcome) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file: " + path);
    std::vector<std::string> header = split_line(line);
    const int n_cols = static_cast<int>(header.size());
    if (n_cols < 2) throw CsvError("fewer than 2 columns in " + path);

    std::set<std::string> seen;
    for (auto& h : header) {
        h = trim(h);
        if (h.empty()) throw CsvError("empty column name in header of " + path);
        if (!seen.insert(h).second) throw CsvError("duplicate column name '" + h + "' in " + path);
    }

    std::vector<std::vector<double>> columns(n_cols);
    int row = 1;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        std::vector<std::string> cells = split_line(line);
        if (static_cast<int>(cells.size()) != n_cols) {
            std::ostringstream msg;
            msg << "row " << row << " has " << cells.size() << " cells, expected " << n_cols;
            throw CsvError(msg.str());
        }
        for (int c = 0; c < n_cols; ++c) columns[c].push_back(parse_cell(cells[c], row, c + 1));
    }
    if (columns.empty() || columns[0].size() < 4) throw CsvError("fewer than 4 data rows in " + path);

    int outcome_col;
    if (outcome.empty()) {
        outcome_col = n_cols - 1;
    } else {
        auto it = std::find(header.begin(), header.end(), outcome);
        if (it != header.end()) {
            outcome_col = static_cast<int>(it - header.begin());
        } else {
            int idx = 0;
            auto [ptr, ec] = std::from_chars(outcome.data(), outcome.data() + outcome.size(), idx);
            if (ec != std::errc{} || ptr != outcome.data() + outcome.size() || idx < 1 || idx > n_cols)
                throw CsvError("outcome column '" + outcome + "' not found in " + path);
            outcome_col = idx - 1;
        }
    }

    return from_columns(std::move(header), std::move(columns), outcome_col, NormalizeMode::MinMax);
}

Dataset Dataset::from_columns(std::vector<std::string> names,
                              std::vector<std::vector<double>> columns,
                              int outcome_col,
                              NormalizeMode mode) {
    if (names.size() != columns.size() || columns.empty())
        throw InvalidArgument("column name/value count mismatch");
    if (outcome_col < 0 || outcome_col >= static_cast<int>(columns.size()))
        throw InvalidArgument("outcome column index out of range");
    const std::size_t n = columns[0].size();
    if (n < 4) throw InvalidArgument("need at least 4 samples");
    for (const auto& c : columns)
        if (c.size() != n) throw InvalidArgument("columns have unequal lengths");

    Dataset ds;
    ds.n_samples_ = static_cast<int>(n);
    ds.outcome_idx_ = outcome_col;
    int next_id = 1;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        Column col;
        col.name = std::move(names[i]);
        col.id = (static_cast<int>(i) == outcome_col) ? 0 : next_id++;
        col.values = std::move(columns[i]);
        if (mode == NormalizeMode::MinMax) {
            auto [mn, mx] = std::minmax_element(col.values.begin(), col.values.end());
            col.norm.min = *mn;
            col.norm.max = *mx;
            col.norm.constant = (*mx == *mn);
            if (col.norm.constant) {
                std::fill(col.values.begin(), col.values.end(), 0.0);
            } else {
                const double span = col.norm.max - col.norm.min;
                for (double& v : col.values) v = (v - col.norm.min) / span;
            }
        }
        ds.cols_.push_back(std::move(col));
    }
    ds.index_features();
    return ds;
}

void Dataset::index_features() {
    feature_ids_.clear();
    for (const auto& c : cols_)
        if (c.id != 0) feature_ids_.push_back(c.id);
}

const Dataset::Column& Dataset::col_by_id(int id) const {
    for (const auto& c : cols_)
        if (c.id == id && id != 0) return c;
    throw InvalidArgument("unknown feature id " + std::to_string(id));
}

bool Dataset::has_feature(int id) const {
    if (id == 0) return false;
    for (const auto& c : cols_)
        if (c.id == id) return true;
    return false;
}

const std::vector<double>& Dataset::feature(int id) const { return col_by_id(id).values; }
const std::string& Dataset::feature_name(int id) const { return col_by_id(id).name; }
const NormMeta& Dataset::feature_norm(int id) const { return col_by_id(id).norm; }

const std::vector<double>& Dataset::outcome() const { return cols_[outcome_idx_].values; }
const std::string& Dataset::outcome_name() const { return cols_[outcome_idx_].name; }
const NormMeta& Dataset::outcome_norm() const { return cols_[outcome_idx_].norm; }

Dataset Dataset::select_features(const std::vector<int>& keep) const {
    if (keep.empty()) throw InvalidArgument("empty feature selection");
    std::set<int> dedup;
    for (int id : keep) {
        if (!has_feature(id)) throw InvalidArgument("unknown feature id " + std::to_string(id));
        if (!dedup.insert(id).second)
            throw InvalidArgument("duplicate feature id " + std::to_string(id));
    }

    Dataset ds;
    ds.n_samples_ = n_samples_;
    for (int id : keep) ds.cols_.push_back(col_by_id(id));
    ds.cols_.push_back(cols_[outcome_idx_]);
    ds.outcome_idx_ = static_cast<int>(ds.cols_.size()) - 1;
    ds.index_features();
    return ds;
}

Dataset Dataset::subset_rows(const std::vector<int>& rows) const {
    if (rows.empty()) throw InvalidArgument("empty row selection");
    for (int r : rows)
        if (r < 0 || r >= n_samples_)
            throw InvalidArgument("row index " + std::to_string(r) + " out of range");

    Dataset ds;
    ds.n_samples_ = static_cast<int>(rows.size());
    ds.outcome_idx_ = outcome_idx_;
    for (const auto& c : cols_) {
        Column col;
        col.name = c.name;
        col.id = c.id;
        col.norm = c.norm;
        col.values.reserve(rows.size());
        for (int r : rows) col.values.push_back(c.values[r]);
        ds.cols_.push_back(std::move(col));
    }
    ds.index_features();
    return ds;
}

FoldPlan Dataset::make_folds(int n_folds, std::uint64_t seed) const {
    if (n_folds < 2 || n_folds > n_samples_)
        throw InvalidArgument("n_folds must be in [2, n_samples]");

    std::vector<int> order(n_samples_);
    for (int i = 0; i < n_samples_; ++i) order[i] = i;
    Rng rng(derive_seed(seed, /*stream=*/0x11));
    for (int i = n_samples_ - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignments.assign(n_samples_, 0);
    for (int i = 0; i < n_samples_; ++i) plan.assignments[order[i]] = i % n_folds;
    return plan;
}

}  // namespace catastrank
