#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "catastrank/dataset.hpp"

namespace catastrank {

/// Wiring of dataset columns into the state/control maps:
///   y[t]     = w0 + w1*S1[t] + ...
///   alpha[t] = a0 + a1*A1[t] + ...
///   beta[t]  = b0 + b1*B1[t] + ...
/// Lists hold feature ids; an empty state list means the outcome column is
/// the single state variable. The three lists must be pairwise disjoint and
/// alpha/beta must be non-empty.
struct CuspRegressionSpec {
    std::vector<int> state_cols;
    std::vector<int> alpha_cols;
    std::vector<int> beta_cols;
};

/// Flat parameter layout [w..., a..., b...] used by the likelihood ops.
struct ParamLayout {
    int nw = 0;
    int na = 0;
    int nb = 0;
    int total() const { return nw + na + nb; }
};
ParamLayout layout_for(const Dataset& ds, const CuspRegressionSpec& spec);

struct FitOptions {
    int multistart = 5;            // 1 informed start + perturbed restarts
    double perturb_scale = 0.5;
    int max_iterations = 500;      // per start
    double grad_tol = 1e-6;        // relative: |grad| <= tol * (1 + |nll|)
    double quad_tol = 1e-9;        // normalizer tolerance inside the optimizer
};

struct CuspFit {
    std::vector<double> w;
    std::vector<double> a;
    std::vector<double> b;
    double loglik = 0.0;
    int k = 0;  // free parameters
    double aic = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

/// Sum over samples of log psi(alpha[t], beta[t]) - (alpha[t]*y[t]
/// + beta[t]*y[t]^2/2 - y[t]^4/4). `params` uses the full layout including
/// any entries the fit would hold fixed.
double negative_log_likelihood(const Dataset& ds, const CuspRegressionSpec& spec,
                               const std::vector<double>& params);

/// Value plus analytic gradient in one quadrature pass per sample: the
/// normalizer derivatives are the density moments E[y] and E[y^2]/2.
struct NllEval {
    double value = 0.0;
    std::vector<double> gradient;
};
NllEval nll_value_and_gradient(const Dataset& ds, const CuspRegressionSpec& spec,
                               const std::vector<double>& params, double quad_tol = 1e-10);

/// Maximum-likelihood fit by BFGS with backtracking line search and
/// deterministic seeded multistart. With a single state column w is pinned
/// to (0, 1), so the per-feature AICs of the ranking share one k.
/// Throws FitError if every start yields a non-finite objective.
CuspFit fit(const Dataset& ds, const CuspRegressionSpec& spec,
            const std::optional<std::vector<double>>& init, std::uint64_t seed,
            const FitOptions& options = {});

/// -2 * loglik + 2k.
double aic_of(const CuspFit& f);

}  // namespace catastrank
