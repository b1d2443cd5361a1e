#pragma once

// Synthetic-data helpers shared by the unit and acceptance suites. The
// sampler is deliberately independent of the library quadrature: it inverts
// a dense trapezoid CDF of exp(alpha*y + beta*y^2/2 - y^4/4).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "catastrank/dataset.hpp"
#include "catastrank/rng.hpp"

namespace synth {

inline double cusp_exponent(double y, double alpha, double beta) {
    return alpha * y + 0.5 * beta * y * y - 0.25 * y * y * y * y;
}

// Inverse-CDF draw from the density proportional to exp(cusp_exponent).
// Deterministic function of (alpha, beta, u) for u in [0, 1).
inline double sample_cusp(double alpha, double beta, double u) {
    double gmax = cusp_exponent(0.0, alpha, beta);
    double span = 1.0;
    for (double y = -10.0; y <= 10.0; y += 0.05) {
        const double g = cusp_exponent(y, alpha, beta);
        if (g > gmax) {
            gmax = g;
            span = std::max(span, std::fabs(y));
        }
    }
    double lo = -span, hi = span;
    while (cusp_exponent(lo, alpha, beta) - gmax > -40.0) lo -= 1.0;
    while (cusp_exponent(hi, alpha, beta) - gmax > -40.0) hi += 1.0;

    constexpr int kCells = 2048;
    const double h = (hi - lo) / kCells;
    std::vector<double> cdf(kCells + 1, 0.0);
    double prev = std::exp(cusp_exponent(lo, alpha, beta) - gmax);
    for (int i = 1; i <= kCells; ++i) {
        const double cur = std::exp(cusp_exponent(lo + i * h, alpha, beta) - gmax);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + cur) * h;
        prev = cur;
    }
    const double target = u * cdf[kCells];
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const int cell = std::max(1, static_cast<int>(it - cdf.begin())) - 1;
    const double mass = cdf[cell + 1] - cdf[cell];
    const double frac = mass > 0.0 ? (target - cdf[cell]) / mass : 0.5;
    return lo + (cell + frac) * h;
}

inline std::vector<double> sample_cusp_series(double alpha, double beta, int n,
                                              catastrank::Rng& rng) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = sample_cusp(alpha, beta, rng.next_double());
    return out;
}

struct PlantedData {
    catastrank::Dataset ds;
    int planted_id;
    int asymmetry_id;
};

// One feature drives a real bifurcation sweep of the outcome; the others
// are uniform noise. Feature 1 is the planted column, the last feature is
// noise reserved for the asymmetry slot.
inline PlantedData make_planted(int n, int n_noise, std::uint64_t seed,
                                double alpha = 0.3, double beta_lo = -2.0,
                                double beta_hi = 3.0) {
    catastrank::Rng rng(seed);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;

    std::vector<double> planted(n);
    for (double& v : planted) v = rng.next_double();
    names.push_back("planted");
    cols.push_back(planted);

    for (int j = 0; j < n_noise; ++j) {
        std::vector<double> noise(n);
        for (double& v : noise) v = rng.next_double();
        names.push_back("noise" + std::to_string(j + 1));
        cols.push_back(std::move(noise));
    }

    std::vector<double> outcome(n);
    for (int i = 0; i < n; ++i) {
        const double beta = beta_lo + (beta_hi - beta_lo) * planted[i];
        outcome[i] = sample_cusp(alpha, beta, rng.next_double());
    }
    names.push_back("outcome");
    cols.push_back(std::move(outcome));

    const int outcome_col = static_cast<int>(names.size()) - 1;
    catastrank::Dataset ds =
        catastrank::Dataset::from_columns(std::move(names), std::move(cols), outcome_col);
    return PlantedData{std::move(ds), 1, n_noise + 1};
}

}  // namespace synth
