#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hisim/action_angle.hpp"
#include "hisim/errors.hpp"
#include "hisim/quadrature.hpp"
#include "oracles.hpp"

using namespace hisim;
using std::numbers::pi;

TEST_CASE("gauss rules integrate their polynomial degree exactly") {
    const GaussRule& gl = gauss_legendre(8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 14);
    CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));

    // int_{-1}^{1} (1-t)^(-1/2) t^2 dt = 2 sqrt(2) * 23/15... computed by substitution 1-t = v^2.
    const double ref = oracle::composite_gauss([](double v) { double t = 1 - v * v; return 2.0 * t * t; }, 0.0,
                                               std::sqrt(2.0), 50);
    const GaussRule& gj = gauss_jacobi_inv_sqrt(16);
    double q = 0.0;
    for (int i = 0; i < 16; ++i) q += gj.weights[i] * gj.nodes[i] * gj.nodes[i];
    CHECK(q == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("psi examples") {
    const Potential q1 = Potential::quadratic(1.0);
    CHECK(psi(q1, 0.5 * std::sqrt(2.0), 0.5) == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(psi_quadrature(q1, 0.5 * std::sqrt(2.0), 0.5).value == doctest::Approx(pi / 4).epsilon(1e-12));
    CHECK(psi(q1, 0.0, 1.0) == 0.0);
    const Potential q2 = Potential::quadratic(2.0);
    CHECK(psi(q2, x_max(q2, 3.0), 3.0) == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(quarter_period(q2, 3.0) == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(quarter_period_quadrature(q2, 3.0).value == doctest::Approx(pi / 4).epsilon(1e-13));
    CHECK(quarter_period(q1, 0.123) == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK_THROWS_AS(psi(q1, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(quarter_period(q1, 0.0), DomainError);
}

TEST_CASE("quarter period against independent theta-substitution oracle") {
    for (const Potential& p : {Potential::even_polynomial({0.5, 0.25}), Potential::even_polynomial({1.0, 0.0, 1.0}),
                               Potential::exp_glued(2), Potential::exp_glued(1)}) {
        for (double E : {0.05, 0.5, 1.0, 4.0}) {
            const double xm = x_max(p, E);
            const double ref = oracle::psi_theta([&](double s) { return p(s); }, xm, xm, E);
            const auto r = quarter_period_quadrature(p, E);
            CHECK(r.value == doctest::Approx(ref).epsilon(1e-9));
            CHECK(r.error < 1e-12);
            const QuadratureSpec twice{128, 1e-14, 2048};
            CHECK(quarter_period_quadrature(p, E, twice).value == doctest::Approx(r.value).epsilon(1e-12));
        }
    }
    const Potential e2 = Potential::exp_glued(2);
    double prev = quarter_period(e2, 0.1);
    for (double E : {0.2, 0.5, 1.0, 2.0}) {
        const double cur = quarter_period(e2, E);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("psi interior points and near-turning-point robustness") {
    for (const Potential& p : {Potential::even_polynomial({1.0}), Potential::even_polynomial({0.5, 1.0}),
                               Potential::exp_glued(3)}) {
        const double E = 1.3;
        const double xm = x_max(p, E);
        double prev = -1.0;
        for (double f : {0.1, 0.4, 0.7, 0.9, 0.99, 1.0 - 1e-6}) {
            const double x = f * xm;
            const double ref = oracle::psi_theta([&](double s) { return p(s); }, xm, x, E, 2000);
            const double v = psi(p, x, E);
            CHECK(v == doctest::Approx(ref).epsilon(1e-9));
            CHECK(v > prev);
            prev = v;
        }
        CHECK(quarter_period(p, E) > prev);
    }
}

TEST_CASE("dpsi_dE closed form, sign and finite differences") {
    CHECK(dpsi_dE(Potential::quadratic(1.0), 1.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(dpsi_dE_quadrature(Potential::quadratic(1.0), 1.0, 1.0).value == doctest::Approx(-0.5).epsilon(1e-11));
    CHECK(dpsi_dE(Potential::even_polynomial({0.5, 1.0}), 0.0, 1.0) == 0.0);
    for (const Potential& p : {Potential::even_polynomial({1.0}), Potential::even_polynomial({0.5, 1.0}),
                               Potential::exp_glued(2)}) {
        for (double E : {0.4, 1.0, 2.5}) {
            const double xm = x_max(p, E);
            for (double f : {0.2, 0.6, 0.95}) {
                const double x = f * xm;
                const double fd = oracle::central_diff([&](double e) { return psi(p, x, e); }, E, 1e-5);
                const double d = dpsi_dE(p, x, E);
                CHECK(d < 0.0);
                CHECK(std::fabs(d - fd) < 1e-6 * std::max(1.0, std::fabs(d)));
            }
        }
    }
    CHECK_THROWS_AS(dpsi_dE(Potential::quadratic(1.0), std::sqrt(2.0), 1.0), DomainError);
}

TEST_CASE("dT_dE: zero for quadratics, matches finite differences otherwise") {
    CHECK(std::fabs(dT_dE_quadrature(Potential::quadratic(1.7), 2.0).value) < 1e-10);
    CHECK(dT_dE(Potential::quadratic(0.5), 3.0) == 0.0);
    const Potential p = Potential::even_polynomial({0.5, 1.0});
    const double d = dT_dE(p, 1.0);
    const double fd = oracle::central_diff([&](double e) { return 4.0 * quarter_period(p, e); }, 1.0, 1e-5);
    CHECK(d < 0.0);
    CHECK(std::fabs(d - fd) < 1e-6);
    const Potential e2 = Potential::exp_glued(2);
    const double de = dT_dE(e2, 0.5);
    const double fde = oracle::central_diff([&](double e) { return 4.0 * quarter_period(e2, e); }, 0.5, 1e-5);
    CHECK(std::fabs(de - fde) < 1e-6 * std::max(1.0, std::fabs(fde)));
    CHECK((de < 0) == (fde < 0));
}

TEST_CASE("psi monotone decreasing in E") {
    const Potential p = Potential::even_polynomial({0.5, 0.25});
    const double x = 0.8;
    double prev = 1e300;
    for (double E = p(x) * 1.01; E < 10.0; E *= 1.5) {
        const double v = psi(p, x, E);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("PsiMap inverse and phase-angle form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Potential& p : {Potential::quadratic(1.4), Potential::even_polynomial({0.5, 1.0})}) {
        const PsiMap m(p, 1.7);
        CHECK(m(m.x_max()) == doctest::Approx(m.quarter()).epsilon(1e-14));
        for (int i = 0; i < 50; ++i) {
            const double x = u(rng) * m.x_max();
            CHECK(m.inverse(m(x)) == doctest::Approx(x).epsilon(1e-12));
            const double px = std::sqrt(2.0 * (1.7 - p(x)));
            CHECK(m.from_state(x, px) == doctest::Approx(m(x)).epsilon(1e-11));
            CHECK(m.speed_at(m(x)) == doctest::Approx(px).epsilon(1e-10));
        }
    }
}

TEST_CASE("quadrature spec validation") {
    CHECK_THROWS_AS(validate(QuadratureSpec{8, 1e-12, 64}), DomainError);
    CHECK_THROWS_AS(validate(QuadratureSpec{64, 1e-16, 1024}), DomainError);
    CHECK_NOTHROW(validate(QuadratureSpec{}));
}
