#include "hisim/iembd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hisim/errors.hpp"
#include "hisim/parallel.hpp"

namespace hisim {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

void check_inputs(const StarPolygon& P, const Potential& V1, const Potential& V2) {
    require_valid(P);
    require_admissible(V1);
    require_admissible(V2);
}

}  // namespace

double extremal_vertical_threshold(const StarPolygon& P, const Potential& V1) {
    double v = std::numeric_limits<double>::infinity();
    for (Quadrant q : kQuadrants) v = std::min(v, V1(P[q].xs.back()));
    return v;
}

double extremal_horizontal_threshold(const StarPolygon& P, const Potential& V2) {
    double v = std::numeric_limits<double>::infinity();
    for (Quadrant q : kQuadrants) v = std::min(v, V2(P[q].ys.front()));
    return v;
}

double low_energy_bound(const StarPolygon& P, const Potential& V1, const Potential& V2) {
    double v = std::numeric_limits<double>::infinity();
    for (Quadrant q : kQuadrants) {
        const auto& s = P[q];
        const int K = s.size();
        for (int k = 0; k <= K; ++k) {
            const double a = k == 0 ? 0.0 : V1(s.xs[k - 1]);
            const double b = k == K ? 0.0 : V2(s.ys[k]);
            v = std::min(v, a + b);
        }
    }
    return v;
}

double high_energy_bound(const StarPolygon& P, const Potential& V1, const Potential& V2) {
    return extremal_vertical_threshold(P, V1) + extremal_horizontal_threshold(P, V2);
}

IntervalSet nonimpacting_set(const StarPolygon& P, const Potential& V1, const Potential& V2, double E) {
    if (!(E > 0.0)) throw DomainError("nonimpacting_set: requires E > 0");
    check_inputs(P, V1, V2);
    // The union over index choices of per-quadrant intersections equals the intersection
    // over quadrants of per-quadrant unions.
    IntervalSet out = IntervalSet::of(0.0, E);
    for (Quadrant q : kQuadrants) {
        const auto& s = P[q];
        std::vector<Interval> parts;
        for (int l = 0; l < s.size(); ++l) parts.push_back({E - V2(s.ys[l]), V1(s.xs[l])});
        out = out.intersect(IntervalSet(std::move(parts)));
    }
    return out;
}

IntervalSet interior_impact_set(const StarPolygon& P, const Potential& V1, const Potential& V2, double E) {
    const IntervalSet nonimp = nonimpacting_set(P, V1, V2, E);
    const double lo = std::max(0.0, E - extremal_horizontal_threshold(P, V2));
    const double hi = std::min(E, extremal_vertical_threshold(P, V1));
    if (!(lo < hi)) return {};
    return IntervalSet::of(lo, hi).subtract(nonimp);
}

EnergyPartition partition(const StarPolygon& P, const Potential& V1, const Potential& V2, double E) {
    if (!(E > 0.0)) throw DomainError("partition: requires E > 0");
    check_inputs(P, V1, V2);
    const double tol = 1e-12 * E;

    std::vector<double> raw;
    for (Quadrant q : kQuadrants) {
        const auto& s = P[q];
        for (int k = 0; k < s.size(); ++k) {
            raw.push_back(V1(s.xs[k]));
            raw.push_back(E - V2(s.ys[k]));
        }
    }
    std::sort(raw.begin(), raw.end());
    EnergyPartition out;
    out.E = E;
    for (double v : raw) {
        if (!(v > tol && v < E - tol)) continue;
        if (!out.breakpoints.empty() && v - out.breakpoints.back().value <= tol)
            ++out.breakpoints.back().multiplicity;
        else
            out.breakpoints.push_back({v, 1});
    }

    const IntervalSet nonimp = nonimpacting_set(P, V1, V2, E);
    const double ev = extremal_vertical_threshold(P, V1), eh = extremal_horizontal_threshold(P, V2);
    std::vector<double> edges{0.0};
    for (const auto& b : out.breakpoints) edges.push_back(b.value);
    edges.push_back(E);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        LabelledInterval li;
        li.lo = edges[i];
        li.hi = edges[i + 1];
        const double mid = 0.5 * (li.lo + li.hi);
        for (Quadrant q : kQuadrants) {
            const auto ref = step_indices(P[q], V1, V2, E, mid);
            for (double f : {0.25, 0.75})
                if (step_indices(P[q], V1, V2, E, li.lo + f * (li.hi - li.lo)) != ref)
                    throw std::logic_error("partition: step indices vary inside an interval");
        }
        li.genus = genus(P, V1, V2, E, mid);
        li.nonimpacting = nonimp.contains(mid);
        li.touches_extremal_vertical = mid > ev;
        li.touches_extremal_horizontal = mid < E - eh;
        li.interior_impact = !li.nonimpacting && !li.touches_extremal_vertical && !li.touches_extremal_horizontal;
        out.intervals.push_back(li);
    }
    return out;
}

std::string_view region_name(Region r) {
    switch (r) {
        case Region::NoImpact: return "no_impact";
        case Region::Interior: return "interior";
        case Region::ExtremalVertical: return "extremal_vertical";
        case Region::ExtremalHorizontal: return "extremal_horizontal";
        case Region::ExtremalBoth: return "extremal_both";
    }
    return "?";
}

bool Wedge::covers(double E, double E1) const {
    switch (kind) {
        case WedgeKind::Corner: return e1_lo < E1 && E1 < E - e2_lo;
        case WedgeKind::ExtremalVertical: return e1_lo < E1 && E1 < E;
        case WedgeKind::ExtremalHorizontal: return 0.0 < E1 && E1 < E - e2_lo;
    }
    return false;
}

std::vector<std::pair<double, double>> Wedge::polyline(double e_max) const {
    switch (kind) {
        case WedgeKind::Corner: return {{e_max, e1_lo}, {apex(), e1_lo}, {e_max, e_max - e2_lo}};
        case WedgeKind::ExtremalVertical: return {{e_max, e1_lo}, {e1_lo, e1_lo}, {e_max, e_max}};
        case WedgeKind::ExtremalHorizontal: return {{e_max, 0.0}, {e2_lo, 0.0}, {e_max, e_max - e2_lo}};
    }
    return {};
}

std::vector<Wedge> wedges(const StarPolygon& P, const Potential& V1, const Potential& V2) {
    check_inputs(P, V1, V2);
    std::vector<Wedge> out;
    auto add = [&](WedgeKind kind, double a, double b, Quadrant q) {
        for (Wedge& w : out)
            if (w.kind == kind && near(w.e1_lo, a) && near(w.e2_lo, b)) {
                ++w.multiplicity;
                w.quadrants.push_back(q);
                return;
            }
        out.push_back({kind, a, b, 1, {q}});
    };
    for (Quadrant q : kQuadrants) {
        const auto& s = P[q];
        for (int k = 1; k < s.size(); ++k) add(WedgeKind::Corner, V1(s.xs[k - 1]), V2(s.ys[k]), q);
        add(WedgeKind::ExtremalVertical, V1(s.xs.back()), 0.0, q);
        add(WedgeKind::ExtremalHorizontal, 0.0, V2(s.ys.front()), q);
    }
    return out;
}

Diagram diagram(const StarPolygon& P, const Potential& V1, const Potential& V2, double e_min, double e_max,
                int resolution, unsigned workers) {
    if (!(e_min >= 0.0 && e_max > e_min)) throw DomainError("diagram: requires 0 <= e_min < e_max");
    if (resolution < 1) throw DomainError("diagram: resolution must be positive");
    check_inputs(P, V1, V2);
    Diagram d;
    d.e_min = e_min;
    d.e_max = e_max;
    d.resolution = resolution;
    d.wedges = wedges(P, V1, V2);
    const double ev = extremal_vertical_threshold(P, V1), eh = extremal_horizontal_threshold(P, V2);

    std::vector<std::vector<DiagramCell>> columns(resolution);
    parallel_for(resolution, workers, [&](std::size_t i) {
        const double E = e_min + (i + 0.5) * (e_max - e_min) / resolution;
        const IntervalSet nonimp = nonimpacting_set(P, V1, V2, E);
        auto& col = columns[i];
        for (int j = 0; j < resolution; ++j) {
            const double E1 = (j + 0.5) * e_max / resolution;
            if (E1 >= E) break;
            DiagramCell c;
            c.E = E;
            c.E1 = E1;
            c.genus = genus(P, V1, V2, E, E1);
            for (const Wedge& w : d.wedges)
                if (w.kind == WedgeKind::Corner && w.covers(E, E1)) c.corner_wedges += w.multiplicity;
            const bool v = E1 > ev, h = E1 < E - eh;
            c.region = v && h ? Region::ExtremalBoth
                       : v    ? Region::ExtremalVertical
                       : h    ? Region::ExtremalHorizontal
                       : nonimp.contains(E1) ? Region::NoImpact
                                             : Region::Interior;
            col.push_back(c);
        }
    });
    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i)
            if (j < static_cast<int>(columns[i].size())) d.cells.push_back(columns[i][j]);
    return d;
}

std::string diagram_csv(const Diagram& d) {
    std::ostringstream os;
    os << "E,E1,genus,corner_wedges,region\n";
    for (const auto& c : d.cells)
        os << fmt(c.E) << ',' << fmt(c.E1) << ',' << c.genus << ',' << c.corner_wedges << ',' << region_name(c.region)
           << '\n';
    return os.str();
}

namespace {

std::string cell_fill(const DiagramCell& c) {
    switch (c.region) {
        case Region::NoImpact: return "#c8c8c8";
        case Region::ExtremalVertical: return "#f4a6c6";
        case Region::ExtremalHorizontal: return "#bfe8b4";
        case Region::ExtremalBoth: return "#d9b8a8";
        case Region::Interior: break;
    }
    // Deeper blue for more overlapping corner wedges.
    static const char* blues[] = {"#dbe6f7", "#a9c2ec", "#7a9fe0", "#4d7bd2", "#2a5bb8", "#173f8f"};
    return blues[std::min(c.corner_wedges, 5)];
}

}  // namespace

std::string diagram_svg(const Diagram& d) {
    const double W = 720, H = 720, m = 60;
    const double ex = d.e_max - d.e_min;
    auto X = [&](double E) { return m + (E - d.e_min) / ex * W; };
    auto Y = [&](double E1) { return m + H - E1 / d.e_max * H; };
    const double cw = W / d.resolution, ch = H / d.resolution;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W + 2 * m) << "\" height=\"" << fmt(H + 2 * m)
       << "\" viewBox=\"0 0 " << fmt(W + 2 * m) << ' ' << fmt(H + 2 * m) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g shape-rendering=\"crispEdges\">\n";
    // Cells are emitted row by row with equal neighbours merged into one rectangle.
    for (std::size_t a = 0; a < d.cells.size();) {
        std::size_t b = a + 1;
        const std::string fill = cell_fill(d.cells[a]);
        while (b < d.cells.size() && d.cells[b].E1 == d.cells[a].E1 && cell_fill(d.cells[b]) == fill) ++b;
        const auto& c0 = d.cells[a];
        os << "<rect x=\"" << fmt(X(c0.E) - 0.5 * cw) << "\" y=\"" << fmt(Y(c0.E1) - 0.5 * ch) << "\" width=\""
           << fmt(cw * double(b - a)) << "\" height=\"" << fmt(ch) << "\" fill=\"" << fill << "\"/>\n";
        a = b;
    }
    os << "</g>\n<g fill=\"none\" stroke-width=\"1.5\">\n";
    for (const Wedge& w : d.wedges) {
        if (w.apex() >= d.e_max) continue;
        const char* stroke = w.kind == WedgeKind::Corner             ? "#0b2a6b"
                             : w.kind == WedgeKind::ExtremalVertical ? "#b0306a"
                                                                     : "#2f7d32";
        os << "<polyline stroke=\"" << stroke << "\" data-multiplicity=\"" << w.multiplicity << "\" points=\"";
        bool first = true;
        for (auto [E, E1] : w.polyline(d.e_max)) {
            os << (first ? "" : " ") << fmt(X(std::max(E, d.e_min))) << ',' << fmt(Y(E1));
            first = false;
        }
        os << "\"><title>" << (w.kind == WedgeKind::Corner ? "corner" : "extremal") << " wedge, apex E="
           << fmt(w.apex()) << ", multiplicity " << w.multiplicity << "</title></polyline>\n";
    }
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"14\">\n";
    os << "<line x1=\"" << fmt(m) << "\" y1=\"" << fmt(m + H) << "\" x2=\"" << fmt(m + W) << "\" y2=\"" << fmt(m + H)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(m) << "\" y1=\"" << fmt(m) << "\" x2=\"" << fmt(m) << "\" y2=\"" << fmt(m + H)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(m + W / 2) << "\" y=\"" << fmt(H + 1.6 * m) << "\">E</text>\n";
    os << "<text x=\"" << fmt(m / 3) << "\" y=\"" << fmt(m + H / 2) << "\">E1</text>\n";
    os << "<text x=\"" << fmt(m) << "\" y=\"" << fmt(H + 1.35 * m) << "\">" << fmt(d.e_min) << "</text>\n";
    os << "<text x=\"" << fmt(m + W - 20) << "\" y=\"" << fmt(H + 1.35 * m) << "\">" << fmt(d.e_max) << "</text>\n";
    os << "<text x=\"" << fmt(m / 3) << "\" y=\"" << fmt(m + 5) << "\">" << fmt(d.e_max) << "</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace hisim
