#include "catastrank/relief.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "catastrank/errors.hpp"
#include "catastrank/rng.hpp"

namespace catastrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Neighbors {
    int hit = -1;
    int miss = -1;
};

Neighbors nearest(const std::vector<const std::vector<double>*>& cols,
                  const std::vector<int>& bins, int t) {
    Neighbors nb;
    double best_hit = kInf, best_miss = kInf;
    const int n = static_cast<int>(bins.size());
    for (int j = 0; j < n; ++j) {
        if (j == t) continue;
        double d2 = 0.0;
        for (const auto* c : cols) {
            const double d = (*c)[t] - (*c)[j];
            d2 += d * d;
        }
        if (bins[j] == bins[t]) {
            if (d2 < best_hit) {
                best_hit = d2;
                nb.hit = j;
            }
        } else if (d2 < best_miss) {
            best_miss = d2;
            nb.miss = j;
        }
    }
    return nb;
}

}  // namespace

double diff(double xk, double yk, double nu_k) {
    if (!(nu_k > 0.0)) throw InvalidArgument("diff normalization unit must be positive");
    return (xk - yk) / nu_k;
}

std::vector<int> equal_frequency_bins(const std::vector<double>& values, int bins) {
    if (bins < 2) throw InvalidArgument("class_bins must be at least 2");
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    std::vector<int> out(n);
    for (int r = 0; r < n; ++r)
        out[order[r]] = static_cast<int>((static_cast<long long>(r) * bins) / n);
    return out;
}

ReliefWeights relief_rank(const Dataset& ds, int m, double tau, int class_bins,
                          std::uint64_t seed) {
    if (m < 1) throw InvalidArgument("m must be at least 1");
    if (tau < 0.0 || tau > 1.0) throw InvalidArgument("tau must lie in [0, 1]");

    const int n = ds.n_samples();
    const std::vector<int> bins = equal_frequency_bins(ds.outcome(), class_bins);

    std::vector<int> bin_count(class_bins, 0);
    for (int b : bins) ++bin_count[b];
    std::vector<char> usable(n, 0);
    bool any_usable = false;
    for (int t = 0; t < n; ++t) {
        usable[t] = bin_count[bins[t]] >= 2;
        any_usable = any_usable || usable[t];
    }
    if (!any_usable)
        throw InvalidArgument("every outcome bin is a singleton; RELIEF needs a possible hit");

    std::vector<const std::vector<double>*> cols;
    for (int id : ds.feature_ids()) cols.push_back(&ds.feature(id));
    const int p = static_cast<int>(cols.size());

    ReliefWeights rw;
    rw.feature_ids = ds.feature_ids();
    rw.weights.assign(p, 0.0);
    rw.m = m;
    rw.tau = tau;
    rw.class_bins = class_bins;
    rw.seed = seed;

    int used = 0;
    auto update = [&](int t) {
        const Neighbors nb = nearest(cols, bins, t);
        for (int i = 0; i < p; ++i) {
            const double x = (*cols[i])[t];
            const double dh = diff(x, (*cols[i])[nb.hit], 1.0);
            const double dm = diff(x, (*cols[i])[nb.miss], 1.0);
            rw.weights[i] = rw.weights[i] - dh * dh + dm * dm;
        }
        ++used;
    };

    if (m == n) {
        for (int t = 0; t < n; ++t)
            if (usable[t]) update(t);
    } else {
        Rng rng(seed);
        for (int s = 0; s < m; ++s) {
            int t;
            do {
                t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            } while (!usable[t]);
            update(t);
        }
    }

    for (double& w : rw.weights) w /= static_cast<double>(used);
    rw.relevant.resize(p);
    for (int i = 0; i < p; ++i) rw.relevant[i] = rw.weights[i] > tau;
    return rw;
}

std::vector<int> ranked_ids(const ReliefWeights& rw) {
    std::vector<int> order(rw.feature_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (rw.weights[a] != rw.weights[b]) return rw.weights[a] > rw.weights[b];
        return rw.feature_ids[a] < rw.feature_ids[b];
    });
    std::vector<int> ids(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) ids[i] = rw.feature_ids[order[i]];
    return ids;
}

void export_relief(const ReliefWeights& rw, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "attribute_id,weight,relevant\n";
    const std::vector<int> order = [&] {
        std::vector<int> o(rw.feature_ids.size());
        std::iota(o.begin(), o.end(), 0);
        std::sort(o.begin(), o.end(), [&](int a, int b) {
            if (rw.weights[a] != rw.weights[b]) return rw.weights[a] > rw.weights[b];
            return rw.feature_ids[a] < rw.feature_ids[b];
        });
        return o;
    }();
    char buf[64];
    for (int i : order) {
        std::snprintf(buf, sizeof(buf), "%.6f", rw.weights[i]);
        out << rw.feature_ids[i] << ',' << buf << ','
            << (rw.relevant[i] ? "true" : "false") << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace catastrank
