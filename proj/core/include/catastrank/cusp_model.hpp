#pragma once

#include <vector>

namespace catastrank {

/// Control parameters of the cusp surface: alpha tilts the potential
/// (asymmetry), beta splits one equilibrium into three (bifurcation).
struct CuspParams {
    double alpha = 0.0;
    double beta = 0.0;
};

enum class Stability { stable, unstable };

/// Real equilibria of alpha + beta*y - y^3 = 0, sorted ascending. A double
/// root on the bifurcation boundary is reported once and labeled unstable.
struct EquilibriumSet {
    std::vector<double> roots;
    std::vector<Stability> stability;
    double discriminant = 0.0;
};

/// Canonical cusp potential V(y) = -(alpha*y + beta*y^2/2 - y^4/4).
double potential(double y, const CuspParams& p);

/// Cardan discriminant 27*alpha^2 - 4*beta^3. Positive: one equilibrium,
/// negative: three, zero: degenerate (bifurcation set).
double discriminant(const CuspParams& p);

/// Closed-form equilibria (trigonometric/Cardano), Newton-refined; stability
/// from the sign of V''(r) = 3r^2 - beta.
EquilibriumSet equilibria(const CuspParams& p);

/// log of the normalization constant psi = integral of exp(-V) over R,
/// by adaptive Gauss-Kronrod quadrature on a truncation interval whose tail
/// mass is negligible; the integrand is rescaled by its peak so arbitrarily
/// large |alpha|, |beta| stay in range. `tol` is the absolute tolerance on
/// the peak-scaled mass. Throws QuadratureError if refinement is exhausted.
double log_normalizer(const CuspParams& p, double tol = 1e-11);

/// Stationary probability density exp(-V(y)) / psi. Never returns infinity.
double density(double y, const CuspParams& p);

/// log psi together with the first two moments of the density, from one
/// quadrature pass. E[y] equals d(log psi)/d(alpha) and E[y^2]/2 equals
/// d(log psi)/d(beta), which is what the likelihood gradient needs.
struct CuspMoments {
    double log_psi = 0.0;
    double mean = 0.0;           // E[y]
    double second_moment = 0.0;  // E[y^2]
};
CuspMoments cusp_moments(const CuspParams& p, double tol = 1e-11);

}  // namespace catastrank
