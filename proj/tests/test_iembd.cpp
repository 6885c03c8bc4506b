#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "hisim/errors.hpp"
#include "hisim/flow.hpp"
#include "hisim/iembd.hpp"
#include "random_polygon.hpp"

using namespace hisim;

namespace {

StarPolygon cross() { return StarPolygon::symmetric({{1.0, 2.0}, {2.0, 1.0}}); }

// Explicit union over all index choices (l^{++}, l^{+-}, l^{-+}, l^{--}) of the per-choice intersection.
IntervalSet brute_nonimpacting(const StarPolygon& P, const Potential& V1, const Potential& V2, double E) {
    std::vector<Interval> parts;
    std::array<int, 4> l{0, 0, 0, 0};
    std::function<void(int)> rec = [&](int q) {
        if (q == 4) {
            double lo = 0.0, hi = E;
            for (int i = 0; i < 4; ++i) {
                lo = std::max(lo, E - V2(P.quadrants[i].ys[l[i]]));
                hi = std::min(hi, V1(P.quadrants[i].xs[l[i]]));
            }
            if (lo <= hi) parts.push_back({lo, hi});
            return;
        }
        for (l[q] = 0; l[q] < P.quadrants[q].size(); ++l[q]) rec(q + 1);
    };
    rec(0);
    return IntervalSet(parts);
}

// Whether an orbit of the physical flow hits any wall, and whether any hit wall is extremal.
std::pair<bool, bool> census(const StarPolygon& P, const Potential& V, double E, double E1, double T) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Boundary B = polygon_boundary(P);
    bool any = false, extremal = false;
    for (int i = 0; i < 6; ++i) {
        double x, y;
        do {
            x = 0.99 * x_max(V, E1) * u(rng);
            y = 0.99 * x_max(V, E - E1) * u(rng);
        } while (!B.contains({x, y}, -1e-6));
        const PhaseState s{x, y, std::sqrt(2 * (E1 - V(x))), (u(rng) < 0 ? -1 : 1) * std::sqrt(2 * (E - E1 - V(y)))};
        const auto traj = physical_flow(P, V, V, E, E1, s, T);
        for (const auto& e : traj.events) {
            any = true;
            const int K = P[e.wall.quadrant].size();
            if ((e.wall.vertical && e.wall.step == K) || (!e.wall.vertical && e.wall.step == 1)) extremal = true;
        }
    }
    return {any, extremal};
}

}  // namespace

TEST_CASE("interval set algebra") {
    const IntervalSet a({{0, 1}, {2, 3}, {0.5, 1.5}});
    REQUIRE(a.parts().size() == 2);
    CHECK(a.parts()[0] == Interval{0, 1.5});
    CHECK(a.measure() == doctest::Approx(2.5));
    const IntervalSet b = IntervalSet::of(1, 2.5);
    CHECK(a.intersect(b).measure() == doctest::Approx(1.0));
    CHECK(a.subtract(b).measure() == doctest::Approx(1.5));
    CHECK(a.unite(b).parts().size() == 1);
    CHECK(a.contains(2.0));
    CHECK_FALSE(a.contains(1.7));
    CHECK(IntervalSet::of(2, 1).empty());
}

TEST_CASE("energy partition of the symmetric cross") {
    const Potential V = Potential::quadratic(1.0);
    const EnergyPartition p = partition(cross(), V, V, 2.0);
    REQUIRE(p.breakpoints.size() == 2);
    CHECK(p.breakpoints[0].value == doctest::Approx(0.5));
    CHECK(p.breakpoints[1].value == doctest::Approx(1.5));
    CHECK(p.breakpoints[0].multiplicity == 4);
    CHECK(p.breakpoints[1].multiplicity == 4);
    REQUIRE(p.intervals.size() == 3);
    CHECK(p.intervals[0].genus == 1);
    CHECK(p.intervals[1].genus == 5);
    CHECK(p.intervals[2].genus == 1);
    CHECK(p.intervals[0].nonimpacting);
    CHECK(p.intervals[1].interior_impact);
    CHECK(p.intervals[2].nonimpacting);
}

TEST_CASE("energy partition at low energy") {
    const Potential V = Potential::quadratic(1.0);
    const StarPolygon P = cross();
    CHECK(low_energy_bound(P, V, V) == doctest::Approx(1.0));
    // Below every critical value: one interval.
    const EnergyPartition p = partition(P, V, V, 0.4);
    REQUIRE(p.intervals.size() == 1);
    CHECK(p.intervals[0].nonimpacting);
    CHECK(p.intervals[0].genus == 1);
    // Below the low-energy bound the breakpoints still split (0, E) but nothing impacts.
    const EnergyPartition q = partition(P, V, V, 0.8);
    CHECK(q.intervals.size() == 3);
    for (const auto& i : q.intervals) {
        CHECK(i.nonimpacting);
        CHECK(i.genus == 1);
    }
    CHECK(nonimpacting_set(P, V, V, 0.8).measure() == doctest::Approx(0.8));
    CHECK_THROWS_AS(partition(P, V, V, 0.0), DomainError);
}

TEST_CASE("partition labels hold throughout each interval on random polygons") {
    std::mt19937_64 rng(2024);
    const Potential V1 = Potential::quadratic(1.0), V2 = Potential::even_polynomial({0.5, 0.1});
    for (int trial = 0; trial < 30; ++trial) {
        const StarPolygon P = testutil::random_polygon(rng, 3);
        std::uniform_real_distribution<double> eu(0.2, 5.0);
        const double E = eu(rng);
        const EnergyPartition p = partition(P, V1, V2, E);
        int sumK = 0;
        for (Quadrant q : kQuadrants) sumK += P[q].size();
        int nb = 0;
        for (const auto& b : p.breakpoints) nb += b.multiplicity;
        CHECK(nb <= 2 * sumK);
        const IntervalSet nonimp = nonimpacting_set(P, V1, V2, E);
        CHECK(nonimp.measure() == doctest::Approx(brute_nonimpacting(P, V1, V2, E).measure()).epsilon(1e-12));
        double covered = 0.0;
        for (const auto& li : p.intervals) {
            covered += li.hi - li.lo;
            for (int s = 1; s <= 10; ++s) {
                const double e1 = li.lo + (li.hi - li.lo) * s / 11.0;
                CHECK(genus(P, V1, V2, E, e1) == li.genus);
                CHECK(nonimp.contains(e1) == li.nonimpacting);
            }
            // Every interval is non-impacting, interior-impact or touches an extremal side.
            CHECK((li.nonimpacting || li.interior_impact || li.touches_extremal_vertical ||
                   li.touches_extremal_horizontal));
        }
        CHECK(covered == doctest::Approx(E).epsilon(1e-12));
    }
}

TEST_CASE("non-impacting and interior-impact sets") {
    const Potential V = Potential::quadratic(1.0);
    const StarPolygon P = cross();
    CHECK(nonimpacting_set(P, V, V, 0.3).measure() == doctest::Approx(0.3));
    CHECK(high_energy_bound(P, V, V) == doctest::Approx(4.0));
    CHECK(nonimpacting_set(P, V, V, 4.5).empty());
    CHECK(interior_impact_set(P, V, V, 4.5).empty());
    CHECK(interior_impact_set(P, V, V, 0.8).empty());

    const IntervalSet gaps = nonimpacting_set(P, V, V, 2.0);
    REQUIRE(gaps.parts().size() == 2);
    CHECK(gaps.parts()[0] == Interval{0.0, 0.5});
    CHECK(gaps.parts()[1] == Interval{1.5, 2.0});
    const IntervalSet inner = interior_impact_set(P, V, V, 2.0);
    REQUIRE(inner.parts().size() == 1);
    CHECK(inner.parts()[0].lo == doctest::Approx(0.5));
    CHECK(inner.parts()[0].hi == doctest::Approx(1.5));

    // Simulation census with the raw polygon.
    const double T = 20 * 2 * std::numbers::pi;
    for (double e1 : {0.25, 1.75}) CHECK_FALSE(census(P, V, 2.0, e1, T).first);
    const auto [hit, extremal] = census(P, V, 2.0, 1.0, T);
    CHECK(hit);
    CHECK_FALSE(extremal);
}

TEST_CASE("diagram labels and wedges") {
    const Potential V = Potential::quadratic(1.0);
    const StarPolygon P = cross();
    const auto ws = wedges(P, V, V);
    int corner = 0;
    for (const auto& w : ws)
        if (w.kind == WedgeKind::Corner) {
            ++corner;
            CHECK(w.multiplicity == 4);
            CHECK(w.apex() == doctest::Approx(1.0));
        }
    CHECK(corner == 1);

    const Diagram d = diagram(P, V, V, 0.0, 5.0, 60);
    CHECK_FALSE(d.cells.empty());
    for (const auto& c : d.cells) {
        CHECK(c.genus == 1 + c.corner_wedges);
        if (c.corner_wedges == 0 && c.region == Region::NoImpact) CHECK(c.genus == 1);
        if (c.region == Region::Interior) CHECK(c.corner_wedges > 0);
    }
    const std::string csv = diagram_csv(d);
    CHECK(csv.rfind("E,E1,genus,corner_wedges,region\n", 0) == 0);
    const std::string svg = diagram_svg(d);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("multiplicity 4") != std::string::npos);
    // Parallel evaluation gives the same cells.
    CHECK(diagram_csv(diagram(P, V, V, 0.0, 5.0, 60, 1)) == diagram_csv(diagram(P, V, V, 0.0, 5.0, 60, 3)));
}

TEST_CASE("asymmetric polygon wedges have distinct apexes at V1(x_k) + V2(y_{k+1})") {
    const Potential V1 = Potential::quadratic(1.0), V2 = Potential::quadratic(0.8);
    StarPolygon P;
    P[Quadrant::PP] = {{0.8, 2.5}, {2.2, 0.9}};
    P[Quadrant::PM] = {{1.0, 2.5}, {2.0, 0.7}};
    P[Quadrant::MP] = {{1.2, 2.8}, {2.2, 1.1}};
    P[Quadrant::MM] = {{0.6, 2.8}, {2.0, 0.5}};
    REQUIRE(validate(P).ok);
    for (const auto& w : wedges(P, V1, V2)) {
        if (w.kind != WedgeKind::Corner) continue;
        CHECK(w.multiplicity == 1);
        const auto& s = P[w.quadrants.front()];
        CHECK(w.apex() == doctest::Approx(V1(s.xs[0]) + V2(s.ys[1])));
        const auto pl = w.polyline(6.0);
        CHECK(pl[1].first == doctest::Approx(w.apex()));
        CHECK(pl[1].second == doctest::Approx(V1(s.xs[0])));
    }
}
