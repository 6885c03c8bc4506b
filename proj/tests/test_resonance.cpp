#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hisim/action_angle.hpp"
#include "hisim/errors.hpp"
#include "hisim/flow.hpp"
#include "hisim/iembd.hpp"
#include "hisim/resonance.hpp"
#include "oracles.hpp"
#include "random_polygon.hpp"

using namespace hisim;
using std::numbers::pi;

namespace {

StarPolygon cross() { return StarPolygon::symmetric({{1.0, 2.0}, {2.0, 1.0}}); }

// Max over active concave corners of the colour of the taxicab distance from the corner
// (in psi coordinates, computed by direct integration) to the outer corner (w, h), divided by C.
double taxicab_delta(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1, Colour colour) {
    const ColourPartition part = green_partition(spec.m, spec.n);
    const Potential V1 = spec.V1(), V2 = spec.V2();
    auto v1 = [&](double x) { return V1(x); };
    auto v2 = [&](double y) { return V2(y); };
    const double xm = std::sqrt(2 * E1) / (spec.n * spec.c), ym = std::sqrt(2 * (E - E1)) / (spec.m * spec.c);
    const double w = oracle::psi_theta(v1, xm, xm, E1), h = oracle::psi_theta(v2, ym, ym, E - E1);
    double best = 0.0;
    for (Quadrant q : kQuadrants) {
        if (part.colour_of(q) != colour) continue;
        const auto& s = P[q];
        for (int k = 1; k < s.size(); ++k) {
            const double x = s.xs[k - 1], y = s.ys[k];
            if (!(x < xm && y < ym)) continue;
            const double d = (w - oracle::psi_theta(v1, xm, x, E1)) + (h - oracle::psi_theta(v2, ym, y, E - E1));
            best = std::max(best, d);
        }
    }
    return best / spec.C();
}

}  // namespace

TEST_CASE("green partition rule") {
    using Q = Quadrant;
    auto g = [](int m, int n) { return green_partition(m, n).green; };
    CHECK(g(1, 2) == std::array{Q::PP, Q::PM});
    CHECK(g(2, 1) == std::array{Q::PP, Q::MP});
    CHECK(g(1, 1) == std::array{Q::PP, Q::MM});
    CHECK(g(3, 5) == std::array{Q::PP, Q::MM});
    CHECK_THROWS_AS(green_partition(2, 4), DomainError);
    CHECK_THROWS_AS(ResonanceSpec::make(0, 1, 1.0), DomainError);
    for (auto [m, n] : {std::pair{1, 2}, {2, 1}, {1, 1}, {3, 4}, {5, 3}}) {
        const ColourPartition p = green_partition(m, n);
        int green = 0, red = 0;
        for (Quadrant q : kQuadrants) (p.colour_of(q) == Colour::Green ? green : red)++;
        CHECK(green == 2);
        CHECK(red == 2);
        CHECK(p.colour_of(p.red[0]) == Colour::Red);
        CHECK(p.colour_of(p.red[1]) == Colour::Red);
    }
}

TEST_CASE("resonance spec quarter periods agree with the action-angle module") {
    for (auto [m, n, c] : {std::tuple{1, 2, 1.0}, {2, 1, 0.7}, {3, 2, 1.3}}) {
        const ResonanceSpec s = ResonanceSpec::make(m, n, c);
        for (double E1 : {0.3, 1.0, 4.0}) {
            CHECK(std::fabs(quarter_period_quadrature(s.V1(), E1).value - s.quarter_T1()) < 1e-12);
            CHECK(std::fabs(quarter_period_quadrature(s.V2(), E1).value - s.quarter_T2()) < 1e-12);
        }
        CHECK(s.geodesic_period() == doctest::Approx(4 * n * s.quarter_T1()));
        CHECK(s.geodesic_period() == doctest::Approx(4 * m * s.quarter_T2()));
    }
}

TEST_CASE("delta examples") {
    const ResonanceSpec s = ResonanceSpec::make(1, 1, 1.0);
    const StarPolygon P = cross();
    // V1(1)/E1 = V2(1)/(E - E1) = 1/2.
    CHECK(delta_colour(P, s, 2.0, 1.0, Colour::Green) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(delta_colour(P, s, 2.0, 1.0, Colour::Red) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(corner_delta(s, 1.0, 1.0, 2.0, 1.0) == 0.0);
    // No active corner in the colour gives 0.
    CHECK(delta_colour(P, s, 2.0, 0.3, Colour::Green) == 0.0);
    CHECK_THROWS_AS(delta_colour(P, s, 2.0, 2.0, Colour::Green), DomainError);
}

TEST_CASE("C delta equals the taxicab distance to the marked geodesic") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int nonzero = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const StarPolygon P = testutil::random_polygon(rng, 3);
        const int m = 1 + trial % 3, n = 1 + (trial / 3) % 2 * 2;
        const ResonanceSpec s = ResonanceSpec::make(m, n == 3 && m == 3 ? 1 : n, 0.5 + u(rng));
        const double E = 0.5 + 4 * u(rng), E1 = E * (0.05 + 0.9 * u(rng));
        for (Colour c : {Colour::Green, Colour::Red}) {
            const double d = delta_colour(P, s, E, E1, c);
            CHECK(d == doctest::Approx(taxicab_delta(P, s, E, E1, c)).epsilon(1e-9));
            CHECK(d >= 0.0);
            CHECK(d <= (s.m + s.n) * pi / 2 + 1e-12);
            if (d > 0) ++nonzero;
        }
    }
    CHECK(nonzero > 10);
}

TEST_CASE("corner contributions are monotone in E1") {
    const ResonanceSpec s = ResonanceSpec::make(2, 3, 1.0);
    const double E = 5.0, a = 0.8, b = 1.1;
    double prev1 = -1.0, prev2 = 1e9;
    for (int i = 1; i < 100; ++i) {
        const double E1 = a + (E - b - a) * i / 100.0;
        const double t1 = s.m * std::acos(std::sqrt(a / E1)), t2 = s.n * std::acos(std::sqrt(b / (E - E1)));
        CHECK(corner_delta(s, a, b, E, E1) == doctest::Approx(t1 + t2).epsilon(1e-14));
        CHECK(t1 > prev1);
        CHECK(t2 < prev2);
        prev1 = t1;
        prev2 = t2;
    }
}

TEST_CASE("U classification") {
    const ResonanceSpec s = ResonanceSpec::make(1, 1, 1.0);
    const StarPolygon P = cross();
    const double E = 2.0;
    auto f = [&](double e1) {
        return delta_colour(P, s, E, e1, Colour::Green) + delta_colour(P, s, E, e1, Colour::Red) - pi;
    };
    // On (0.5, 1.5) the sum is 2 (arccos sqrt(0.5/E1) + arccos sqrt(0.5/(2-E1))), which touches pi at E1 = 1.
    const auto parts = classify_U(P, s, E, 0.5, 1.5);
    REQUIRE_FALSE(parts.empty());
    CHECK(parts.front().lo == 0.5);
    CHECK(parts.back().hi == 1.5);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& p = parts[i];
        CHECK((f(0.5 * (p.lo + p.hi)) > 0) == p.plus);
        if (i + 1 < parts.size()) {
            CHECK(p.hi == parts[i + 1].lo);
            CHECK(p.plus != parts[i + 1].plus);
            CHECK((f(p.hi - 1e-9) > 0) != (f(p.hi + 1e-9) > 0));
        }
    }

    // A single shallow corner keeps the sum below pi everywhere.
    StarPolygon Q;
    Q[Quadrant::PP] = {{0.5, 3.0}, {3.0, 0.5}};
    Q[Quadrant::PM] = {{3.0}, {3.0}};
    Q[Quadrant::MP] = {{3.0}, {3.0}};
    Q[Quadrant::MM] = {{3.0}, {3.0}};
    REQUIRE(validate(Q).ok);
    // delta_green = arccos sqrt(0.125/E1) + arccos sqrt(0.125/(4-E1)) exceeds pi/2 but stays below pi.
    const auto one = classify_U(Q, s, 4.0, 0.2, 3.8);
    REQUIRE(one.size() == 1);
    CHECK_FALSE(one.front().plus);
}

TEST_CASE("U classification finds a single sign change") {
    // m = n = 1 and corners in both colours whose sum crosses pi exactly once on the interval.
    const ResonanceSpec s = ResonanceSpec::make(1, 1, 1.0);
    StarPolygon P;
    P[Quadrant::PP] = {{0.3, 3.0}, {3.0, 1.2}};
    P[Quadrant::MM] = {{0.3, 3.0}, {3.0, 1.2}};
    P[Quadrant::PM] = {{0.3, 3.0}, {3.0, 1.2}};
    P[Quadrant::MP] = {{0.3, 3.0}, {3.0, 1.2}};
    REQUIRE(validate(P).ok);
    const double E = 3.0;
    // Active for 0.045 < E1 < 3 - 0.72; each colour contributes the same value.
    auto f = [&](double e1) { return 2 * corner_delta(s, 0.045, 0.72, E, e1) - pi; };
    const double lo = 0.05, hi = 2.2;
    REQUIRE((f(lo) > 0) != (f(hi) > 0));
    const auto parts = classify_U(P, s, E, lo, hi);
    REQUIRE(parts.size() == 2);
    const double root = oracle::bisect([&](double e1) { return f(lo) < 0 ? f(e1) : -f(e1); }, lo, hi);
    CHECK(std::fabs(parts[0].hi - root) < 1e-10);
    CHECK(parts[0].plus == (f(0.5 * (parts[0].lo + parts[0].hi)) > 0));
    CHECK(parts[1].plus == (f(0.5 * (parts[1].lo + parts[1].hi)) > 0));
}

TEST_CASE("cylinder fractions") {
    const ResonanceSpec s = ResonanceSpec::make(2, 1, 1.0);
    StarPolygon P = StarPolygon::symmetric({{std::sqrt(2.0) * std::cos(pi / 8), 2.0}, {1.0, std::sqrt(0.5) * std::cos(pi / 8)}});
    // Each colour: m arccos(cos(pi/8)) + n arccos(cos(pi/8)) = 3 pi / 8.
    const double E = 2.0, E1 = 1.0;
    CHECK(delta_colour(P, s, E, E1, Colour::Green) == doctest::Approx(3 * pi / 8).epsilon(1e-13));
    const CylinderFractions f = cylinder_fractions(P, s, E, E1);
    CHECK(f.periodic == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(f.red + f.green + f.periodic == doctest::Approx(1.0).epsilon(1e-15));

    const ResonanceSpec s1 = ResonanceSpec::make(1, 1, 1.0);
    const StarPolygon Q = StarPolygon::symmetric({{std::sqrt(2.0) * std::cos(pi / 8), 3.0}, {3.0, std::sqrt(2.0) * std::cos(pi / 8)}});
    // pi/8 + pi/8 per colour: periodic fraction 1/2.
    CHECK(cylinder_fractions(Q, s1, 2.0, 1.0).periodic == doctest::Approx(0.5).epsilon(1e-13));
    // Symmetric cross at E = 2, E1 = 1: delta sum = pi exactly, no periodic cylinder.
    CHECK_THROWS_AS(cylinder_fractions(cross(), s1, 2.0, 1.0), DomainError);
    // Away from E1 = 1 the sum drops below pi and a periodic cylinder opens.
    CHECK(cylinder_fractions(cross(), s1, 2.0, 1.3).periodic > 0.0);
}

TEST_CASE("torus chart components predict first impacts") {
    const ResonanceSpec s = ResonanceSpec::make(2, 1, 1.0);
    StarPolygon P;
    P[Quadrant::PP] = {{2.0}, {1.0}};
    P[Quadrant::MP] = {{2.0}, {1.0}};
    P[Quadrant::PM] = {{std::sqrt(2.0) * std::cos(0.3), 2.0}, {1.0, std::cos(0.35) / std::sqrt(2.0)}};
    P[Quadrant::MM] = {{std::sqrt(2.0) * std::cos(0.2), 2.0}, {1.0, std::cos(0.45) / std::sqrt(2.0)}};
    REQUIRE(validate(P).ok);
    const double E = 2.0, E1 = 1.0;
    const TorusChart chart(P, s, E, E1);
    CHECK(chart.delta(Colour::Red) == doctest::Approx(0.95).epsilon(1e-13));
    CHECK(chart.delta(Colour::Green) == 0.0);
    const ColourPartition part = green_partition(2, 1);
    CHECK(chart.marked(part.green[0]) == doctest::Approx(chart.marked(part.green[1])));
    CHECK(chart.marked(part.red[0]) == doctest::Approx(chart.marked(part.red[1])));

    const BilliardTable t = build_table(P, s.V1(), s.V2(), E, E1);
    const Boundary B = table_boundary(t);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BilliardOptions opt;
    opt.stop_at_wall = true;
    int periodic = 0, red = 0;
    for (int i = 0; i < 400; ++i) {
        PsiState st{t.w * u(rng), t.h * u(rng), u(rng) < 0 ? -1 : 1, u(rng) < 0 ? -1 : 1};
        if (!B.contains(st.position())) continue;
        const auto traj = billiard_flow(t, st, 3 * s.geodesic_period(), opt);
        const auto comp = chart.component(st);
        const auto codes = traj.wall_codes();
        if (!comp) {
            ++periodic;
            CHECK(codes.empty());
            CHECK_FALSE(traj.died);
        } else {
            ++red;
            CHECK(*comp == Colour::Red);
            REQUIRE((!codes.empty() || traj.died));
            if (!codes.empty()) {
                Quadrant q{};
                for (const auto& e : traj.events)
                    if (e.kind == EventKind::Wall) {
                        q = e.wall.quadrant;
                        break;
                    }
                CHECK(part.colour_of(q) == Colour::Red);
            }
        }
    }
    CHECK(periodic > 50);
    CHECK(red > 50);
}

TEST_CASE("scenario labels") {
    const ResonanceSpec s = ResonanceSpec::make(1, 1, 1.0);
    const Potential V = Potential::quadratic(1.0);
    const StarPolygon P = cross();
    CHECK(scenario(P, V, V, 0.9, 0.1, 0.5, s) == Scenario::CP);
    CHECK(scenario(P, V, V, 4.5, 1.0, 2.0, s) == Scenario::UE);
    CHECK(scenario(P, V, V, 2.0, 0.0, 0.5, s) == Scenario::CP);
    CHECK(scenario(P, V, V, 3.0, 2.1, 2.9, s) == Scenario::UEExtremal);
    CHECK(scenario(P, V, V, 2.0, 0.5, 1.5, std::nullopt) == Scenario::UE);
    CHECK(scenario(P, Potential::exp_glued(2), V, 2.0, 0.5, 1.5, std::nullopt) != Scenario::CP);
    CHECK_THROWS_AS(scenario(P, Potential::quadratic(2.0), V, 2.0, 0.5, 1.5, s), DomainError);

    // Coexistence: a U- interval inside the interior-impact window.
    const ResonanceSpec s21 = ResonanceSpec::make(2, 1, 1.0);
    const Potential V1 = s21.V1(), V2 = s21.V2();
    StarPolygon Q;
    Q[Quadrant::PP] = {{2.0}, {1.0}};
    Q[Quadrant::MP] = {{2.0}, {1.0}};
    Q[Quadrant::PM] = {{std::sqrt(2.0) * std::cos(0.3), 2.0}, {1.0, std::cos(0.35) / std::sqrt(2.0)}};
    Q[Quadrant::MM] = {{std::sqrt(2.0) * std::cos(0.2), 2.0}, {1.0, std::cos(0.45) / std::sqrt(2.0)}};
    const EnergyPartition p = partition(Q, V1, V2, 2.0);
    bool found = false;
    for (const auto& li : p.intervals)
        if (li.lo < 1.0 && 1.0 < li.hi) {
            CHECK(li.interior_impact);
            CHECK(scenario(Q, V1, V2, 2.0, li.lo, li.hi, s21) == Scenario::Coex);
            found = true;
        }
    CHECK(found);
}
