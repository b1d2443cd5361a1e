#include "catastrank/cusp_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "catastrank/cusp_model.hpp"
#include "catastrank/errors.hpp"
#include "catastrank/rng.hpp"

namespace catastrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
    const std::vector<double>* outcome = nullptr;
    std::vector<const std::vector<double>*> state;
    std::vector<const std::vector<double>*> alpha;
    std::vector<const std::vector<double>*> beta;
    int n = 0;
    ParamLayout layout;

    double state_value(int t, const double* w) const {
        if (state.empty()) return w[0] + w[1] * (*outcome)[t];
        double y = w[0];
        for (std::size_t j = 0; j < state.size(); ++j) y += w[j + 1] * (*state[j])[t];
        return y;
    }
    double control(int t, const double* c,
                   const std::vector<const std::vector<double>*>& cols) const {
        double v = c[0];
        for (std::size_t j = 0; j < cols.size(); ++j) v += c[j + 1] * (*cols[j])[t];
        return v;
    }
};

Problem make_problem(const Dataset& ds, const CuspRegressionSpec& spec) {
    if (spec.alpha_cols.empty() || spec.beta_cols.empty())
        throw InvalidArgument("alpha and beta covariate lists must be non-empty");
    auto check_disjoint = [](const std::vector<int>& a, const std::vector<int>& b) {
        for (int x : a)
            for (int y : b)
                if (x == y)
                    throw InvalidArgument("state/alpha/beta column lists must be disjoint");
    };
    check_disjoint(spec.state_cols, spec.alpha_cols);
    check_disjoint(spec.state_cols, spec.beta_cols);
    check_disjoint(spec.alpha_cols, spec.beta_cols);

    Problem pr;
    pr.outcome = &ds.outcome();
    pr.n = ds.n_samples();
    for (int id : spec.state_cols) pr.state.push_back(&ds.feature(id));
    for (int id : spec.alpha_cols) pr.alpha.push_back(&ds.feature(id));
    for (int id : spec.beta_cols) pr.beta.push_back(&ds.feature(id));
    pr.layout.nw = static_cast<int>(std::max<std::size_t>(pr.state.size(), 1)) + 1;
    pr.layout.na = static_cast<int>(pr.alpha.size()) + 1;
    pr.layout.nb = static_cast<int>(pr.beta.size()) + 1;
    return pr;
}

inline double nll_term(double y, double alpha, double beta, double log_psi) {
    const double y2 = y * y;
    return log_psi - (alpha * y + 0.5 * beta * y2 - 0.25 * y2 * y2);
}

double nll_value(const Problem& pr, const double* params, double quad_tol) {
    const double* w = params;
    const double* a = params + pr.layout.nw;
    const double* b = a + pr.layout.na;
    double total = 0.0;
    for (int t = 0; t < pr.n; ++t) {
        const double y = pr.state_value(t, w);
        const double alpha = pr.control(t, a, pr.alpha);
        const double beta = pr.control(t, b, pr.beta);
        if (!std::isfinite(y) || !std::isfinite(alpha) || !std::isfinite(beta)) return kInf;
        double log_psi;
        try {
            log_psi = log_normalizer({alpha, beta}, quad_tol);
        } catch (const QuadratureError& e) {
            std::ostringstream msg;
            msg << e.what() << " (sample " << t << ")";
            throw QuadratureError(msg.str(), e.alpha, e.beta);
        }
        total += nll_term(y, alpha, beta, log_psi);
    }
    return total;
}

NllEval nll_eval(const Problem& pr, const double* params, double quad_tol) {
    const int nw = pr.layout.nw, na = pr.layout.na;
    const double* w = params;
    const double* a = params + nw;
    const double* b = a + na;

    NllEval out;
    out.gradient.assign(pr.layout.total(), 0.0);
    double* gw = out.gradient.data();
    double* ga = gw + nw;
    double* gb = ga + na;

    for (int t = 0; t < pr.n; ++t) {
        const double y = pr.state_value(t, w);
        const double alpha = pr.control(t, a, pr.alpha);
        const double beta = pr.control(t, b, pr.beta);
        if (!std::isfinite(y) || !std::isfinite(alpha) || !std::isfinite(beta)) {
            out.value = kInf;
            return out;
        }
        CuspMoments mom;
        try {
            mom = cusp_moments({alpha, beta}, quad_tol);
        } catch (const QuadratureError& e) {
            std::ostringstream msg;
            msg << e.what() << " (sample " << t << ")";
            throw QuadratureError(msg.str(), e.alpha, e.beta);
        }
        out.value += nll_term(y, alpha, beta, mom.log_psi);

        const double da = mom.mean - y;
        const double db = 0.5 * (mom.second_moment - y * y);
        ga[0] += da;
        for (std::size_t j = 0; j < pr.alpha.size(); ++j) ga[j + 1] += da * (*pr.alpha[j])[t];
        gb[0] += db;
        for (std::size_t j = 0; j < pr.beta.size(); ++j) gb[j + 1] += db * (*pr.beta[j])[t];

        const double dy = -(alpha + beta * y - y * y * y);
        gw[0] += dy;
        if (pr.state.empty()) {
            gw[1] += dy * (*pr.outcome)[t];
        } else {
            for (std::size_t j = 0; j < pr.state.size(); ++j) gw[j + 1] += dy * (*pr.state[j])[t];
        }
    }
    return out;
}

double column_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = column_mean(x), my = column_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double denom = std::sqrt(sxx * syy);
    return denom > 0.0 ? sxy / denom : 0.0;
}

// Moment-informed start: place the density mode at the state mean with a
// curvature matching the state variance, then seed the covariate slopes
// with correlations against y and y^2.
std::vector<double> informed_start(const Problem& pr, const CuspRegressionSpec& spec,
                                   const Dataset& ds) {
    std::vector<double> params(pr.layout.total(), 0.0);
    double* w = params.data();
    double* a = w + pr.layout.nw;
    double* b = a + pr.layout.na;

    if (pr.state.empty()) {
        w[0] = 0.0;
        w[1] = 1.0;
    } else {
        w[0] = 0.0;
        for (int j = 1; j < pr.layout.nw; ++j) w[j] = 1.0 / static_cast<double>(pr.state.size());
    }

    std::vector<double> y(pr.n);
    for (int t = 0; t < pr.n; ++t) y[t] = pr.state_value(t, w);
    std::vector<double> y2(pr.n);
    for (int t = 0; t < pr.n; ++t) y2[t] = y[t] * y[t];

    const double m = column_mean(y);
    double var = 0.0;
    for (double v : y) var += (v - m) * (v - m);
    var = std::max(var / static_cast<double>(pr.n), 1e-4);

    double b0 = std::clamp(3.0 * m * m - 1.0 / var, -100.0, 100.0);
    double a0 = m * m * m - b0 * m;

    for (std::size_t j = 0; j < pr.alpha.size(); ++j) {
        a[j + 1] = correlation(*pr.alpha[j], y);
        a0 -= a[j + 1] * column_mean(*pr.alpha[j]);
    }
    for (std::size_t j = 0; j < pr.beta.size(); ++j) {
        b[j + 1] = correlation(*pr.beta[j], y2);
        b0 -= b[j + 1] * column_mean(*pr.beta[j]);
    }
    a[0] = a0;
    b[0] = b0;
    (void)spec;
    (void)ds;
    return params;
}

struct BfgsResult {
    std::vector<double> x;  // full parameter vector
    double value = kInf;
    bool converged = false;
    int iterations = 0;
    double grad_norm = kInf;
};

double free_norm(const std::vector<double>& g, const std::vector<int>& free_idx) {
    double s = 0.0;
    for (int i : free_idx) s += g[i] * g[i];
    return std::sqrt(s);
}

BfgsResult minimize(const Problem& pr, std::vector<double> x0, const std::vector<int>& free_idx,
                    const FitOptions& opt) {
    const int nf = static_cast<int>(free_idx.size());
    BfgsResult res;
    res.x = std::move(x0);

    auto safe_value = [&](const std::vector<double>& p) {
        try {
            return nll_value(pr, p.data(), opt.quad_tol);
        } catch (const QuadratureError&) {
            return kInf;
        }
    };
    auto safe_eval = [&](const std::vector<double>& p) {
        try {
            return nll_eval(pr, p.data(), opt.quad_tol);
        } catch (const QuadratureError&) {
            NllEval bad;
            bad.value = kInf;
            bad.gradient.assign(p.size(), 0.0);
            return bad;
        }
    };

    NllEval cur = safe_eval(res.x);
    if (!std::isfinite(cur.value)) {
        res.value = kInf;
        return res;
    }

    std::vector<double> H(static_cast<std::size_t>(nf) * nf, 0.0);  // inverse Hessian
    for (int i = 0; i < nf; ++i) H[i * nf + i] = 1.0;

    std::vector<double> g(nf), p(nf), s(nf), yv(nf), hy(nf), trial(res.x.size());
    for (int i = 0; i < nf; ++i) g[i] = cur.gradient[free_idx[i]];

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        const double gnorm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
        if (gnorm <= opt.grad_tol * (1.0 + std::fabs(cur.value))) {
            res.converged = true;
            break;
        }

        for (int i = 0; i < nf; ++i) {
            double v = 0.0;
            for (int j = 0; j < nf; ++j) v += H[i * nf + j] * g[j];
            p[i] = -v;
        }
        double gtp = std::inner_product(g.begin(), g.end(), p.begin(), 0.0);
        if (gtp >= 0.0) {  // not a descent direction, reset curvature
            std::fill(H.begin(), H.end(), 0.0);
            for (int i = 0; i < nf; ++i) H[i * nf + i] = 1.0;
            for (int i = 0; i < nf; ++i) p[i] = -g[i];
            gtp = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        }

        // backtracking Armijo search
        double step = 1.0;
        double fnew = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            trial = res.x;
            for (int i = 0; i < nf; ++i) trial[free_idx[i]] += step * p[i];
            fnew = safe_value(trial);
            if (fnew <= cur.value + 1e-4 * step * gtp) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        NllEval next = safe_eval(trial);
        if (!std::isfinite(next.value)) break;

        for (int i = 0; i < nf; ++i) {
            s[i] = step * p[i];
            yv[i] = next.gradient[free_idx[i]] - g[i];
        }
        const double ys = std::inner_product(yv.begin(), yv.end(), s.begin(), 0.0);
        const double snorm = std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0));
        const double ynorm = std::sqrt(std::inner_product(yv.begin(), yv.end(), yv.begin(), 0.0));
        if (ys > 1e-12 * snorm * ynorm) {
            // inverse BFGS: H <- (I - r s y') H (I - r y s') + r s s'
            const double r = 1.0 / ys;
            for (int i = 0; i < nf; ++i) {
                double v = 0.0;
                for (int j = 0; j < nf; ++j) v += H[i * nf + j] * yv[j];
                hy[i] = v;
            }
            const double yhy = std::inner_product(yv.begin(), yv.end(), hy.begin(), 0.0);
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j)
                    H[i * nf + j] += (1.0 + r * yhy) * r * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
        }

        res.x = trial;
        cur = std::move(next);
        for (int i = 0; i < nf; ++i) g[i] = cur.gradient[free_idx[i]];
    }

    res.value = cur.value;
    res.iterations = iter;
    res.grad_norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
    if (res.grad_norm <= opt.grad_tol * (1.0 + std::fabs(res.value))) res.converged = true;
    return res;
}

}  // namespace

ParamLayout layout_for(const Dataset& ds, const CuspRegressionSpec& spec) {
    return make_problem(ds, spec).layout;
}

double negative_log_likelihood(const Dataset& ds, const CuspRegressionSpec& spec,
                               const std::vector<double>& params) {
    const Problem pr = make_problem(ds, spec);
    if (static_cast<int>(params.size()) != pr.layout.total())
        throw InvalidArgument("parameter vector length does not match spec layout");
    return nll_value(pr, params.data(), 1e-10);
}

NllEval nll_value_and_gradient(const Dataset& ds, const CuspRegressionSpec& spec,
                               const std::vector<double>& params, double quad_tol) {
    const Problem pr = make_problem(ds, spec);
    if (static_cast<int>(params.size()) != pr.layout.total())
        throw InvalidArgument("parameter vector length does not match spec layout");
    return nll_eval(pr, params.data(), quad_tol);
}

CuspFit fit(const Dataset& ds, const CuspRegressionSpec& spec,
            const std::optional<std::vector<double>>& init, std::uint64_t seed,
            const FitOptions& options) {
    const Problem pr = make_problem(ds, spec);

    std::vector<int> free_idx;
    const bool pin_state = pr.state.size() <= 1;  // w fixed to (0, 1)
    for (int i = pin_state ? pr.layout.nw : 0; i < pr.layout.total(); ++i) free_idx.push_back(i);

    std::vector<double> start0 =
        init ? *init : informed_start(pr, spec, ds);
    if (static_cast<int>(start0.size()) != pr.layout.total())
        throw InvalidArgument("init vector length does not match spec layout");
    if (pin_state) {
        start0[0] = 0.0;
        start0[1] = 1.0;
    }

    BfgsResult best;
    bool have_best = false;
    const int starts = std::max(1, options.multistart);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x = start0;
        if (s > 0) {
            Rng rng(derive_seed(seed, 0x5a, static_cast<std::uint64_t>(s)));
            for (int i : free_idx)
                x[i] += options.perturb_scale * (1.0 + std::fabs(start0[i])) * rng.next_normal();
        }
        BfgsResult r = minimize(pr, std::move(x), free_idx, options);
        if (!std::isfinite(r.value)) continue;
        const bool better = !have_best || (r.converged && !best.converged) ||
                            (r.converged == best.converged && r.value < best.value);
        if (better) {
            best = std::move(r);
            have_best = true;
        }
    }
    if (!have_best) throw FitError("all optimizer starts produced a non-finite likelihood");

    CuspFit f;
    f.w.assign(best.x.begin(), best.x.begin() + pr.layout.nw);
    f.a.assign(best.x.begin() + pr.layout.nw, best.x.begin() + pr.layout.nw + pr.layout.na);
    f.b.assign(best.x.begin() + pr.layout.nw + pr.layout.na, best.x.end());
    f.loglik = -best.value;
    f.k = static_cast<int>(free_idx.size());
    f.aic = -2.0 * f.loglik + 2.0 * f.k;
    f.converged = best.converged;
    f.iterations = best.iterations;
    f.grad_norm = best.grad_norm;
    return f;
}

double aic_of(const CuspFit& f) { return -2.0 * f.loglik + 2.0 * f.k; }

}  // namespace catastrank
