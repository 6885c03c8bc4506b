#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "euler_oracle.hpp"
#include "hisim/errors.hpp"
#include "hisim/geometry.hpp"
#include "random_polygon.hpp"

using namespace hisim;
using std::numbers::pi;

namespace {

StarPolygon cross() { return StarPolygon::symmetric({{1.0, 2.0}, {2.0, 1.0}}); }

}  // namespace

TEST_CASE("validate") {
    CHECK(validate(cross()).ok);
    StarPolygon bad = cross();
    bad[Quadrant::PM].xs = {2.0, 1.0};
    CHECK_FALSE(validate(bad).ok);
    CHECK(validate(bad).message.find("+-") != std::string::npos);

    StarPolygon mismatch = StarPolygon::symmetric({{1.0}, {2.0}});
    mismatch[Quadrant::MP].ys = {3.0};
    const auto r = validate(mismatch);
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("matching") != std::string::npos);

    StarPolygon degenerate = StarPolygon::symmetric({{1.0, 1.0 + 1e-14}, {2.0, 1.0}});
    CHECK_FALSE(validate(degenerate).ok);
    CHECK_THROWS_AS(require_valid(degenerate), DomainError);
}

TEST_CASE("build_table examples") {
    const Potential V = Potential::quadratic(1.0);
    const BilliardTable low = build_table(cross(), V, V, 0.3, 0.15);
    CHECK(low.w == doctest::Approx(pi / 2));
    CHECK(low.h == doctest::Approx(pi / 2));
    for (Quadrant q : kQuadrants) {
        CHECK(low[q].is_rectangle());
        CHECK(low[q].psi1 == std::vector<double>{low.w});
        CHECK(low[q].psi2 == std::vector<double>{low.h});
    }

    const BilliardTable mid = build_table(cross(), V, V, 2.0, 1.0);
    for (Quadrant q : kQuadrants) {
        const QuadrantTable& t = mid[q];
        CHECK(t.kbar == 2);
        CHECK(t.kunder == 1);
        CHECK(t.concave_corners() == 1);
        CHECK(t.psi1[0] == doctest::Approx(psi(V, 1.0, 1.0)));
        CHECK(t.psi1[1] == doctest::Approx(mid.w));
        CHECK(t.width_is_extremal);
        CHECK(t.psi2[0] == doctest::Approx(mid.h));
        CHECK(t.height_is_extremal);
        CHECK(t.psi2[1] == doctest::Approx(psi(V, 1.0, 1.0)));
    }

    const BilliardTable tiny = build_table(cross(), V, V, 2.0, 2e-9);
    CHECK(genus(cross(), V, V, 2.0, 2e-9) == 1);
    for (Quadrant q : kQuadrants) CHECK(tiny[q].concave_corners() == 0);

    CHECK_THROWS_AS(build_table(cross(), V, V, 2.0, 2.0), DomainError);
    CHECK_THROWS_AS(build_table(cross(), V, V, 2.0, 0.0), DomainError);
}

TEST_CASE("genus and g_max examples") {
    const Potential V = Potential::quadratic(1.0);
    CHECK(genus(cross(), V, V, 0.3, 0.15) == 1);
    CHECK(genus(cross(), V, V, 2.0, 1.0) == 5);
    CHECK(g_max(StarPolygon::symmetric({{1.0}, {1.0}})) == 1);
    CHECK(g_max(cross()) == 5);
    StarPolygon mixed = cross();
    mixed[Quadrant::PM] = {{0.5, 1.0, 2.0}, {2.0, 1.5, 1.0}};
    mixed[Quadrant::MM] = {{0.5, 1.0, 2.0}, {2.0, 1.5, 1.0}};
    CHECK(validate(mixed).ok);
    CHECK(g_max(mixed) == 7);
}

TEST_CASE("singularity data") {
    const Potential V = Potential::quadratic(1.0);
    const SingularityData rect = singularity_data(build_table(cross(), V, V, 0.3, 0.15));
    CHECK(rect.singularities.empty());
    CHECK(rect.multiplicity_sum == 0);
    const SingularityData four = singularity_data(build_table(cross(), V, V, 2.0, 1.0));
    CHECK(four.singularities.size() == 4);
    CHECK(four.multiplicity_sum == 8);
    CHECK(four.genus == 5);
    for (const auto& s : four.singularities) CHECK(s.angle == doctest::Approx(6 * pi));
}

TEST_CASE("table invariants and genus against the glued-complex oracle") {
    std::mt19937_64 rng(2024);
    const Potential V1 = Potential::quadratic(1.0), V2 = Potential::quadratic(0.8 * std::sqrt(2.0));
    int checked = 0, nontrivial = 0;
    while (checked < 40) {
        const StarPolygon P = testutil::random_polygon(rng, 3);
        if (!validate(P).ok) continue;
        ++checked;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10; ++i) {
            const double E = 0.05 + 4.0 * u(rng);
            const double E1 = E * (0.001 + 0.998 * u(rng));
            const BilliardTable t = build_table(P, V1, V2, E, E1);
            for (Quadrant q : kQuadrants) {
                const auto& qt = t[q];
                for (std::size_t j = 1; j < qt.psi1.size(); ++j) {
                    CHECK(qt.psi1[j] > qt.psi1[j - 1]);
                    CHECK(qt.psi2[j] < qt.psi2[j - 1]);
                }
                CHECK((qt.psi1.back() == t.w) == qt.width_is_extremal);
                CHECK((qt.psi2.front() == t.h) == qt.height_is_extremal);
            }
            const int g = genus(P, V1, V2, E, E1);
            const auto glued = oracle::glued_complex(P, V1, V2, E, E1);
            CHECK(glued.euler() % 2 == 0);
            CHECK(glued.genus() == g);
            CHECK(singularity_data(t).genus == g);
            CHECK(g <= g_max(P));
            if (g > 1) ++nontrivial;
        }
    }
    CHECK(nontrivial > 20);
}

TEST_CASE("genus is one near both ends of the momentum range") {
    std::mt19937_64 rng(99);
    const Potential V1 = Potential::quadratic(1.0), V2 = Potential::even_polynomial({0.5, 0.3});
    for (int i = 0; i < 30; ++i) {
        const StarPolygon P = testutil::random_polygon(rng, 3);
        if (!validate(P).ok) continue;
        for (double E : {0.5, 2.0, 6.0}) {
            CHECK(genus(P, V1, V2, E, 1e-9 * E) == 1);
            CHECK(genus(P, V1, V2, E, E * (1 - 1e-9)) == 1);
        }
    }
}
