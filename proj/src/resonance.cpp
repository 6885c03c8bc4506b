#include "hisim/resonance.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "hisim/errors.hpp"
#include "hisim/iembd.hpp"

namespace hisim {

using std::numbers::pi;

ResonanceSpec ResonanceSpec::make(int m, int n, double c) {
    if (m < 1 || n < 1) throw DomainError("resonance: m and n must be positive");
    if (std::gcd(m, n) != 1) throw DomainError("resonance: m and n must be coprime");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("resonance: c must be positive");
    return {m, n, c};
}

double ResonanceSpec::quarter_T1() const { return m * C() * pi / 2.0; }
double ResonanceSpec::quarter_T2() const { return n * C() * pi / 2.0; }
double ResonanceSpec::geodesic_period() const { return 2.0 * pi / c; }
double ResonanceSpec::transverse_length() const { return 2.0 * pi * C(); }

std::string_view colour_name(Colour c) { return c == Colour::Green ? "green" : "red"; }

Colour ColourPartition::colour_of(Quadrant q) const {
    return (q == green[0] || q == green[1]) ? Colour::Green : Colour::Red;
}

ColourPartition green_partition(int m, int n) {
    ResonanceSpec::make(m, n, 1.0);
    using Q = Quadrant;
    if (m % 2 == 1 && n % 2 == 0) return {{Q::PP, Q::PM}, {Q::MP, Q::MM}};
    if (m % 2 == 0 && n % 2 == 1) return {{Q::PP, Q::MP}, {Q::PM, Q::MM}};
    return {{Q::PP, Q::MM}, {Q::PM, Q::MP}};
}

double corner_delta(const ResonanceSpec& spec, double v1_xk, double v2_yk1, double E, double E1) {
    auto ac = [](double r) { return std::acos(std::sqrt(std::clamp(r, 0.0, 1.0))); };
    return spec.m * ac(v1_xk / E1) + spec.n * ac(v2_yk1 / (E - E1));
}

double delta_colour(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1, Colour colour) {
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("delta_colour: requires 0 < E1 < E");
    require_valid(P);
    const ColourPartition part = green_partition(spec.m, spec.n);
    const Potential V1 = spec.V1(), V2 = spec.V2();
    double best = 0.0;
    for (Quadrant q : kQuadrants) {
        if (part.colour_of(q) != colour) continue;
        const auto& s = P[q];
        for (int k = 1; k < s.size(); ++k) {
            const double a = V1(s.xs[k - 1]), b = V2(s.ys[k]);
            if (a < E1 && E1 < E - b) best = std::max(best, corner_delta(spec, a, b, E, E1));
        }
    }
    return best;
}

std::vector<USubinterval> classify_U(const StarPolygon& P, const ResonanceSpec& spec, double E, double lo, double hi,
                                     int grid, double root_tol) {
    if (!(lo < hi)) throw DomainError("classify_U: empty interval");
    if (grid < 2) throw DomainError("classify_U: grid must have at least 2 points");
    auto f = [&](double e1) {
        return delta_colour(P, spec, E, e1, Colour::Green) + delta_colour(P, spec, E, e1, Colour::Red) - pi;
    };
    std::vector<USubinterval> out;
    double start = lo;
    double prev_x = lo + 0.5 * (hi - lo) / grid;
    bool prev_plus = f(prev_x) > 0.0;
    for (int i = 1; i < grid; ++i) {
        const double x = lo + (i + 0.5) * (hi - lo) / grid;
        const bool plus = f(x) > 0.0;
        if (plus != prev_plus) {
            double a = prev_x, b = x;
            while (b - a > root_tol) {
                const double mid = 0.5 * (a + b);
                ((f(mid) > 0.0) == prev_plus ? a : b) = mid;
            }
            const double root = 0.5 * (a + b);
            out.push_back({start, root, prev_plus});
            start = root;
        }
        prev_x = x;
        prev_plus = plus;
    }
    out.push_back({start, hi, prev_plus});
    return out;
}

CylinderFractions cylinder_fractions(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1) {
    const double g = delta_colour(P, spec, E, E1, Colour::Green);
    const double r = delta_colour(P, spec, E, E1, Colour::Red);
    if (g + r >= pi) throw DomainError("cylinder_fractions: delta_green + delta_red >= pi (no periodic cylinder)");
    CylinderFractions out;
    out.red = r / pi;
    out.green = g / pi;
    out.periodic = (pi - r - g) / pi;
    return out;
}

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::UE: return "ue";
        case Scenario::CP: return "cp";
        case Scenario::Coex: return "coex";
        case Scenario::UEExtremal: return "ue_extremal";
        case Scenario::Unknown: return "unknown";
    }
    return "?";
}

namespace {

bool covers(const IntervalSet& s, double lo, double hi) {
    return s.intersect(IntervalSet::of(lo, hi)).measure() >= (hi - lo) * (1.0 - 1e-12);
}

bool matches(const Potential& V, double omega) {
    return V.is_quadratic() && std::fabs(V.omega() - omega) <= 1e-12 * omega;
}

}  // namespace

Scenario scenario(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double lo, double hi,
                  const std::optional<ResonanceSpec>& spec) {
    if (!(E > 0.0)) throw DomainError("scenario: requires E > 0");
    if (!(0.0 <= lo && lo < hi && hi <= E)) throw DomainError("scenario: requires 0 <= lo < hi <= E");
    require_valid(P);
    if (!spec) {
        if (V1.is_quadratic() && V2.is_quadratic()) return Scenario::UE;
        if (check_square_convex(V1).satisfies_vi || check_square_convex(V2).satisfies_vi) return Scenario::UE;
        return Scenario::Unknown;
    }
    if (!matches(V1, spec->n * spec->c) || !matches(V2, spec->m * spec->c))
        throw DomainError("scenario: potentials do not match the resonance spec");

    if (E <= low_energy_bound(P, V1, V2)) return Scenario::CP;
    if (E >= high_energy_bound(P, V1, V2)) return Scenario::UE;
    if (covers(nonimpacting_set(P, V1, V2, E), lo, hi)) return Scenario::CP;
    if (lo >= extremal_vertical_threshold(P, V1) || hi <= E - extremal_horizontal_threshold(P, V2))
        return Scenario::UEExtremal;
    if (covers(interior_impact_set(P, V1, V2, E), lo, hi)) {
        const auto parts = classify_U(P, *spec, E, lo, hi);
        if (parts.size() == 1) return parts.front().plus ? Scenario::UE : Scenario::Coex;
    }
    return Scenario::Unknown;
}

TorusChart::TorusChart(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1)
    : spec_(spec), part_(green_partition(spec.m, spec.n)) {
    w_ = spec.quarter_T1();
    h_ = spec.quarter_T2();
    delta_green_ = delta_colour(P, spec, E, E1, Colour::Green);
    delta_red_ = delta_colour(P, spec, E, E1, Colour::Red);
}

double TorusChart::transverse(const PsiState& s) const {
    const double X = s.s1 > 0 ? s.psi1 : 2.0 * w_ - s.psi1;
    const double Y = s.s2 > 0 ? s.psi2 : 2.0 * h_ - s.psi2;
    const double L = spec_.transverse_length();
    const double u = std::fmod(X - Y, L);
    return u < 0.0 ? u + L : u;
}

double TorusChart::marked(Quadrant q) const {
    return transverse({sign_x(q) * w_, sign_y(q) * h_, 1, 1});
}

double TorusChart::circ_dist(double a, double b) const {
    const double L = spec_.transverse_length();
    const double d = std::fmod(std::fabs(a - b), L);
    return std::min(d, L - d);
}

std::optional<Colour> TorusChart::component(const PsiState& s) const {
    const double u = transverse(s);
    if (circ_dist(u, marked(part_.green[0])) < spec_.C() * delta_green_) return Colour::Green;
    if (circ_dist(u, marked(part_.red[0])) < spec_.C() * delta_red_) return Colour::Red;
    return std::nullopt;
}

bool TorusChart::in_support(Colour c, double psi1, double psi2, int s1, int s2) const {
    const double u = transverse({psi1, psi2, s1, s2});
    const Quadrant q = c == Colour::Green ? part_.green[0] : part_.red[0];
    return circ_dist(u, marked(q)) < spec_.C() * delta(c);
}

}  // namespace hisim
