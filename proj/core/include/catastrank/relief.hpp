#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catastrank/dataset.hpp"

namespace catastrank {

struct ReliefWeights {
    std::vector<int> feature_ids;
    std::vector<double> weights;
    std::vector<bool> relevant;
    int m = 0;
    double tau = 0.0;
    int class_bins = 2;
    std::uint64_t seed = 0;
};

// diff function: (xk - yk) / nu_k. nu_k must be positive; with min-max
// normalized columns nu_k = 1 and the result lies in [-1, 1].
double diff(double xk, double yk, double nu_k);

// Equal-frequency discretization: sorts values (ties by index) and assigns
// bin floor(rank * bins / n). Bin sizes differ by at most one.
std::vector<int> equal_frequency_bins(const std::vector<double>& values, int bins);

// RELIEF weighting with the continuous outcome discretized into class_bins
// equal-frequency bins. m == n_samples runs exhaustively, visiting each
// instance once in index order; otherwise m instances are drawn uniformly
// with replacement. Samples whose bin has no possible hit are skipped and
// (in sampled mode) redrawn.
ReliefWeights relief_rank(const Dataset& ds, int m, double tau, int class_bins,
                          std::uint64_t seed);

// Feature ids ordered by weight descending, ties by ascending id.
std::vector<int> ranked_ids(const ReliefWeights& rw);

// CSV with columns attribute_id, weight, relevant.
void export_relief(const ReliefWeights& rw, const std::string& path);

}  // namespace catastrank
