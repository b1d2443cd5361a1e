#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catastrank/cusp_fit.hpp"
#include "catastrank/dataset.hpp"

namespace catastrank {

struct RankEntry {
    int feature_id = 0;
    double aic = 0.0;        // +inf when the fit failed; NaN for the asymmetry row
    double rank_score = 0.0; // 1/aic; 0 when the fit failed; NaN for the asymmetry row
    bool kept = false;
};

struct RankingTable {
    // Candidates ordered by ascending AIC (ties by ascending feature id),
    // with the asymmetry feature appended last. For all-positive AICs this
    // equals rank_score descending.
    std::vector<RankEntry> entries;
    double threshold_t = 0.0;
    int n_requested = 0;
    int asymmetry_feature = 0;
};

// Per-feature cusp fits with beta <- feature i and alpha <- the asymmetry
// feature (default: the last feature id). Features scoring 1/AIC <= t are
// eliminated (the test is skipped for AIC <= 0); the top n_f survivors are
// marked kept. A failed fit records aic = +inf and is never kept.
RankingTable rank_features(const Dataset& ds, int n_f, double t, int asymmetry,
                           std::uint64_t seed, int threads = 0,
                           const FitOptions& options = {});

// Kept feature ids in table order.
std::vector<int> kept_ids(const RankingTable& rt);

// All candidate ids in table order followed by the asymmetry feature, the
// priority list used for top-c sweeps.
std::vector<int> priority_ids(const RankingTable& rt);

// CSV with columns attribute_id, aic, rank, kept. Non-finite AICs print as
// "inf"; the asymmetry row prints "n/a" for aic and rank.
void export_ranking(const RankingTable& rt, const std::string& path);
RankingTable load_ranking(const std::string& path);

}  // namespace catastrank
