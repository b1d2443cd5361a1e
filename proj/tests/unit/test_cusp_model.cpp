#include <doctest.h>

#include <cmath>

#include "catastrank/cusp_model.hpp"
#include "catastrank/rng.hpp"
#include "oracles.hpp"

using catastrank::CuspParams;
using catastrank::EquilibriumSet;
using catastrank::Stability;

TEST_CASE("potential matches the canonical form") {
    CHECK(catastrank::potential(0.0, {1.5, -2.0}) == 0.0);
    CHECK(catastrank::potential(1.0, {0.0, 0.0}) == doctest::Approx(0.25));
    CHECK(catastrank::potential(2.0, {1.0, 3.0}) == doctest::Approx(-4.0));
}

TEST_CASE("discriminant sign classifies root count") {
    CHECK(catastrank::discriminant({0.0, 0.0}) == 0.0);
    CHECK(catastrank::discriminant({1.0, 0.0}) == doctest::Approx(27.0));
    CHECK(catastrank::discriminant({0.0, 3.0}) == doctest::Approx(-108.0));

    EquilibriumSet one = catastrank::equilibria({1.0, 0.0});
    REQUIRE(one.roots.size() == 1);
    CHECK(one.roots[0] == doctest::Approx(1.0));
}

TEST_CASE("equilibria match analytic and bisection oracles") {
    EquilibriumSet cusp_point = catastrank::equilibria({0.0, 0.0});
    REQUIRE(cusp_point.roots.size() == 1);
    CHECK(cusp_point.roots[0] == doctest::Approx(0.0));
    CHECK(cusp_point.stability[0] == Stability::stable);

    EquilibriumSet three = catastrank::equilibria({0.0, 3.0});
    REQUIRE(three.roots.size() == 3);
    CHECK(three.roots[0] == doctest::Approx(-std::sqrt(3.0)));
    CHECK(three.roots[1] == doctest::Approx(0.0));
    CHECK(three.roots[2] == doctest::Approx(std::sqrt(3.0)));
    CHECK(three.stability[0] == Stability::stable);
    CHECK(three.stability[1] == Stability::unstable);
    CHECK(three.stability[2] == Stability::stable);

    EquilibriumSet steep = catastrank::equilibria({10.0, 1.0});
    REQUIRE(steep.roots.size() == 1);
    CHECK(steep.roots[0] ==
          doctest::Approx(oracle::cubic_root_bisect(10.0, 1.0, 2.0, 3.0)).epsilon(1e-9));
    CHECK(steep.stability[0] == Stability::stable);
}

TEST_CASE("degenerate discriminant reports the double root once, unstable") {
    // y^3 - 3y - 2 = (y + 1)^2 (y - 2)
    EquilibriumSet eq = catastrank::equilibria({2.0, 3.0});
    REQUIRE(eq.roots.size() == 2);
    CHECK(eq.discriminant == doctest::Approx(0.0));
    CHECK(eq.roots[0] == doctest::Approx(-1.0));
    CHECK(eq.roots[1] == doctest::Approx(2.0));
    CHECK(eq.stability[0] == Stability::unstable);
    CHECK(eq.stability[1] == Stability::stable);
}

TEST_CASE("every reported root satisfies the cubic residual bound") {
    catastrank::Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double a = 10.0 * rng.next_double() - 5.0;
        const double b = 10.0 * rng.next_double() - 5.0;
        EquilibriumSet eq = catastrank::equilibria({a, b});
        for (double r : eq.roots) CHECK(std::fabs(a + b * r - r * r * r) <= 1e-9);
    }
}

TEST_CASE("root count agrees with discriminant sign on random draws") {
    catastrank::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double a = 10.0 * rng.next_double() - 5.0;
        const double b = 10.0 * rng.next_double() - 5.0;
        const double delta = catastrank::discriminant({a, b});
        if (std::fabs(delta) <= 1e-9) continue;
        EquilibriumSet eq = catastrank::equilibria({a, b});
        CHECK(eq.roots.size() == (delta > 0.0 ? 1 : 3));
    }
}

TEST_CASE("log normalizer matches closed form and Simpson oracle") {
    const double closed = std::log(std::tgamma(0.25) / std::sqrt(2.0));
    CHECK(catastrank::log_normalizer({0.0, 0.0}) == doctest::Approx(closed).epsilon(1e-10));

    for (double a : {-2.0, 0.0, 2.0})
        for (double b : {-2.0, 0.0, 2.0})
            CHECK(catastrank::log_normalizer({a, b}) ==
                  doctest::Approx(oracle::log_psi_simpson(a, b)).epsilon(1e-8));

    CHECK(catastrank::log_normalizer({0.0, -4.0}) < catastrank::log_normalizer({0.0, 0.0}));
    CHECK(catastrank::log_normalizer({3.0, 0.0}) ==
          doctest::Approx(catastrank::log_normalizer({-3.0, 0.0})).epsilon(1e-12));
}

TEST_CASE("log normalizer survives extreme control values") {
    CHECK(std::isfinite(catastrank::log_normalizer({1e6, 0.0})));
    CHECK(std::isfinite(catastrank::log_normalizer({0.0, 1e4})));
    CHECK(std::isfinite(catastrank::log_normalizer({-1e6, -1e4})));
}

TEST_CASE("density is symmetric, normalized, and never infinite") {
    for (double y : {0.1, 0.7, 2.3})
        CHECK(catastrank::density(y, {0.0, 1.5}) ==
              doctest::Approx(catastrank::density(-y, {0.0, 1.5})).epsilon(1e-12));

    for (double a : {-2.0, 0.0, 2.0})
        for (double b : {-2.0, 0.0, 2.0}) {
            const double L = 8.0;
            const int n = 4000;
            double mass = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double y = -L + 2.0 * L * i / n;
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                mass += w * catastrank::density(y, {a, b});
            }
            mass *= (2.0 * L / n) / 3.0;
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }

    CHECK(std::isfinite(catastrank::density(1e4, {0.0, 0.0})));
    CHECK(std::isfinite(catastrank::density(0.0, {700.0, 700.0})));
}

TEST_CASE("moment identities: normalizer derivatives equal density moments") {
    const double h = 1e-5;
    for (double a : {-2.0, -1.0, 0.0, 1.0, 2.0})
        for (double b : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const catastrank::CuspMoments m = catastrank::cusp_moments({a, b});
            const double da = (catastrank::log_normalizer({a + h, b}) -
                               catastrank::log_normalizer({a - h, b})) /
                              (2.0 * h);
            const double db = (catastrank::log_normalizer({a, b + h}) -
                               catastrank::log_normalizer({a, b - h})) /
                              (2.0 * h);
            CHECK(da == doctest::Approx(m.mean).epsilon(1e-5));
            CHECK(db == doctest::Approx(0.5 * m.second_moment).epsilon(1e-5));
        }
}

TEST_CASE("density maxima sit on stable equilibria") {
    for (const CuspParams p : {CuspParams{0.5, 2.0}, CuspParams{-1.0, 3.0}, CuspParams{2.0, 1.0}}) {
        const EquilibriumSet eq = catastrank::equilibria(p);
        for (std::size_t i = 0; i < eq.roots.size(); ++i) {
            if (eq.stability[i] != Stability::stable) continue;
            const double r = eq.roots[i];
            const double here = catastrank::density(r, p);
            CHECK(here >= catastrank::density(r + 1e-6, p));
            CHECK(here >= catastrank::density(r - 1e-6, p));
        }
    }
}
