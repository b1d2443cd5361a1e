#include "catastrank/cusp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "catastrank/errors.hpp"

namespace catastrank {
namespace {

constexpr double kPi = 3.14159265358979323846;

// exp(-V) drops by e^-60 from its peak outside the truncation interval;
// together with the quartic decay that bounds the tail mass far below the
// 1e-12 budget relative to the retained mass.
constexpr double kLogDrop = 60.0;
constexpr int kMaxPanels = 4096;

void require_finite(const CuspParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta))
        throw InvalidArgument("cusp parameters must be finite");
}

inline double neg_potential(double y, double alpha, double beta) {
    const double y2 = y * y;
    return alpha * y + 0.5 * beta * y2 - 0.25 * y2 * y2;
}

// Real roots of y^3 - beta*y - alpha = 0, unsorted, not refined.
int cubic_roots(double alpha, double beta, double out[3]) {
    const double scale = 27.0 * alpha * alpha + 4.0 * std::fabs(beta * beta * beta);
    const double delta = 27.0 * alpha * alpha - 4.0 * beta * beta * beta;
    if (std::fabs(delta) <= 1e-14 * std::max(1.0, scale)) {
        if (alpha == 0.0 && beta == 0.0) {
            out[0] = 0.0;
            return 1;
        }
        // double root plus a simple root (root sum is zero)
        out[0] = -3.0 * alpha / (2.0 * beta);
        out[1] = 3.0 * alpha / beta;
        return 2;
    }
    if (delta > 0.0) {
        const double d = alpha * alpha / 4.0 - beta * beta * beta / 27.0;
        const double sq = std::sqrt(d);
        out[0] = std::cbrt(alpha / 2.0 + sq) + std::cbrt(alpha / 2.0 - sq);
        return 1;
    }
    // three distinct real roots (requires beta > 0)
    const double m = 2.0 * std::sqrt(beta / 3.0);
    double arg = (3.0 * alpha) / (2.0 * beta) * std::sqrt(3.0 / beta);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) out[k] = m * std::cos(theta - 2.0 * kPi * k / 3.0);
    return 3;
}

inline double newton_refine(double y, double alpha, double beta) {
    for (int i = 0; i < 2; ++i) {
        const double f = y * y * y - beta * y - alpha;
        const double df = 3.0 * y * y - beta;
        if (std::fabs(df) < 1e-8 * (1.0 + y * y)) break;  // double root, leave as-is
        y -= f / df;
    }
    return y;
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelSums {
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
};

// One Kronrod panel of the peak-scaled integrand exp(g(y) - gmax) * (1, y, y^2).
// `err` is the Gauss/Kronrod discrepancy of the mass component.
PanelSums eval_panel(double a, double b, double alpha, double beta, double gmax,
                     bool want_moments, double* err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k_mass = 0.0, k_m1 = 0.0, k_m2 = 0.0, g_mass = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double y1 = c - h * kXgk[i];
        const double y2 = c + h * kXgk[i];
        double f1 = std::exp(neg_potential(y1, alpha, beta) - gmax);
        double f2 = (i == 7) ? 0.0 : std::exp(neg_potential(y2, alpha, beta) - gmax);
        const double fs = f1 + f2;
        k_mass += kWgk[i] * fs;
        if (want_moments) {
            k_m1 += kWgk[i] * (f1 * y1 + f2 * y2);
            k_m2 += kWgk[i] * (f1 * y1 * y1 + f2 * y2 * y2);
        }
        if (i % 2 == 1) g_mass += kWg[i / 2] * fs;
    }
    *err = h * std::fabs(k_mass - g_mass);
    return {h * k_mass, h * k_m1, h * k_m2};
}

struct ScaledIntegral {
    double gmax = 0.0;
    double half_range = 0.0;
    PanelSums sums;
};

// Truncation interval and initial breakpoints from the stationary points of
// g(y) = -V(y); panels are split at each mode so narrow peaks sit on panel
// edges where the rule samples them.
ScaledIntegral integrate_exp_neg_potential(const CuspParams& p, double tol, bool want_moments) {
    const double alpha = p.alpha, beta = p.beta;
    double roots[3];
    const int nr = cubic_roots(alpha, beta, roots);

    double gmax = -std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (int i = 0; i < nr; ++i) {
        gmax = std::max(gmax, neg_potential(roots[i], alpha, beta));
        rmax = std::max(rmax, std::fabs(roots[i]));
    }

    double L = std::max(2.0, 1.2 * rmax + 1.0);
    for (int guard = 0; guard < 400; ++guard) {
        if (neg_potential(L, alpha, beta) - gmax <= -kLogDrop &&
            neg_potential(-L, alpha, beta) - gmax <= -kLogDrop)
            break;
        L *= 1.25;
    }

    std::vector<double> pts{-L, L};
    for (int i = 0; i < nr; ++i) {
        const double r = roots[i];
        const double curv = std::fabs(beta - 3.0 * r * r);
        const double w = 1.0 / std::sqrt(1.0 + curv);
        // out to 8 peak widths: beyond that a Gaussian peak holds < 1e-14 of
        // its mass, so the wide flanking panels cannot swallow tail mass
        for (double x : {r - 8.0 * w, r - 3.0 * w, r - w, r, r + w, r + 3.0 * w, r + 8.0 * w})
            if (x > -L && x < L) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
              pts.end());

    struct Interval {
        double a, b;
    };
    std::vector<Interval> stack;
    for (std::size_t i = pts.size() - 1; i >= 1; --i) stack.push_back({pts[i - 1], pts[i]});

    ScaledIntegral out;
    out.gmax = gmax;
    out.half_range = L;
    int panels = 0;
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        if (++panels > kMaxPanels) {
            std::ostringstream msg;
            msg << "quadrature did not converge for alpha=" << alpha << ", beta=" << beta;
            throw QuadratureError(msg.str(), alpha, beta);
        }
        double err = 0.0;
        const PanelSums s = eval_panel(iv.a, iv.b, alpha, beta, gmax, want_moments, &err);
        const double local_tol = tol * (iv.b - iv.a) / (2.0 * L);
        // Computing g(y) - gmax cancels terms as large as the exponent scale,
        // leaving roundoff noise on the integrand. The Gauss/Kronrod
        // discrepancy cannot drop below that noise, so treat it as converged.
        const double c = 0.5 * (iv.a + iv.b);
        const double c2 = c * c;
        const double exponent_scale = std::fabs(alpha * c) + 0.5 * std::fabs(beta) * c2 +
                                      0.25 * c2 * c2 + std::fabs(gmax);
        const double noise_floor =
            8.0 * std::numeric_limits<double>::epsilon() * exponent_scale * s.mass;
        if (err <= std::max(local_tol, noise_floor) ||
            (iv.b - iv.a) < 1e-13 * (1.0 + std::fabs(iv.a))) {
            out.sums.mass += s.mass;
            out.sums.m1 += s.m1;
            out.sums.m2 += s.m2;
        } else {
            const double mid = 0.5 * (iv.a + iv.b);
            stack.push_back({mid, iv.b});
            stack.push_back({iv.a, mid});
        }
    }
    return out;
}

}  // namespace

double potential(double y, const CuspParams& p) {
    require_finite(p);
    if (!std::isfinite(y)) throw InvalidArgument("state value must be finite");
    return -neg_potential(y, p.alpha, p.beta);
}

double discriminant(const CuspParams& p) {
    require_finite(p);
    return 27.0 * p.alpha * p.alpha - 4.0 * p.beta * p.beta * p.beta;
}

EquilibriumSet equilibria(const CuspParams& p) {
    require_finite(p);
    EquilibriumSet set;
    set.discriminant = discriminant(p);

    double roots[3];
    const int nr = cubic_roots(p.alpha, p.beta, roots);
    if (nr != 2)  // degenerate closed forms are exact; refinement would divide by ~0
        for (int i = 0; i < nr; ++i) roots[i] = newton_refine(roots[i], p.alpha, p.beta);
    std::sort(roots, roots + nr);

    if (nr == 2) {
        // bifurcation boundary: the root with vanishing V'' is the double one
        const double s0 = std::fabs(3.0 * roots[0] * roots[0] - p.beta);
        const double s1 = std::fabs(3.0 * roots[1] * roots[1] - p.beta);
        const int dbl = s0 <= s1 ? 0 : 1;
        for (int i = 0; i < 2; ++i) {
            set.roots.push_back(roots[i]);
            set.stability.push_back(i == dbl ? Stability::unstable : Stability::stable);
        }
        return set;
    }
    for (int i = 0; i < nr; ++i) {
        const double second = 3.0 * roots[i] * roots[i] - p.beta;  // V''(r)
        // at the cusp point (triple root) V = y^4/4, a true minimum
        const Stability st = second >= 0.0 ? Stability::stable : Stability::unstable;
        set.roots.push_back(roots[i]);
        set.stability.push_back(st);
    }
    return set;
}

double log_normalizer(const CuspParams& p, double tol) {
    require_finite(p);
    const ScaledIntegral si = integrate_exp_neg_potential(p, tol, /*want_moments=*/false);
    return si.gmax + std::log(si.sums.mass);
}

double density(double y, const CuspParams& p) {
    require_finite(p);
    if (!std::isfinite(y)) throw InvalidArgument("state value must be finite");
    const double log_d = neg_potential(y, p.alpha, p.beta) - log_normalizer(p);
    return std::exp(std::min(log_d, 700.0));
}

CuspMoments cusp_moments(const CuspParams& p, double tol) {
    require_finite(p);
    const ScaledIntegral si = integrate_exp_neg_potential(p, tol, /*want_moments=*/true);
    CuspMoments m;
    m.log_psi = si.gmax + std::log(si.sums.mass);
    m.mean = si.sums.m1 / si.sums.mass;
    m.second_moment = si.sums.m2 / si.sums.mass;
    return m;
}

}  // namespace catastrank
