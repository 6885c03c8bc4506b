#include "hisim/geometry.hpp"

#include <cmath>
#include <tuple>

#include "hisim/errors.hpp"

namespace hisim {

std::string_view label(Quadrant q) {
    switch (q) {
        case Quadrant::PP: return "++";
        case Quadrant::PM: return "+-";
        case Quadrant::MP: return "-+";
        case Quadrant::MM: return "--";
    }
    return "??";
}

Quadrant parse_quadrant(std::string_view s) {
    for (Quadrant q : kQuadrants)
        if (label(q) == s) return q;
    throw DomainError("unknown quadrant label '" + std::string(s) + "'");
}

StarPolygon StarPolygon::symmetric(const StaircaseData& s) {
    StarPolygon P;
    for (auto& quad : P.quadrants) quad = s;
    return P;
}

namespace {

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

ValidationResult fail(const std::string& msg) { return {false, msg}; }

}  // namespace

ValidationResult validate(const StarPolygon& P) {
    for (Quadrant q : kQuadrants) {
        const StaircaseData& s = P[q];
        const std::string where = "quadrant " + std::string(label(q));
        if (s.xs.empty()) return fail(where + ": empty staircase");
        if (s.xs.size() != s.ys.size()) return fail(where + ": xs and ys differ in length");
        for (int i = 0; i < s.size(); ++i) {
            const std::string at = where + " index " + std::to_string(i);
            if (!std::isfinite(s.xs[i]) || !(s.xs[i] > 0.0)) return fail(at + ": x must be positive");
            if (!std::isfinite(s.ys[i]) || !(s.ys[i] > 0.0)) return fail(at + ": y must be positive");
            if (i > 0 && !(s.xs[i] > s.xs[i - 1] && !close(s.xs[i], s.xs[i - 1])))
                return fail(at + ": xs must be strictly increasing");
            if (i > 0 && !(s.ys[i] < s.ys[i - 1] && !close(s.ys[i], s.ys[i - 1])))
                return fail(at + ": ys must be strictly decreasing");
        }
    }
    auto y1 = [&](Quadrant q) { return P[q].ys.front(); };
    auto xk = [&](Quadrant q) { return P[q].xs.back(); };
    if (!close(y1(Quadrant::PP), y1(Quadrant::MP))) return fail("matching: first height of ++ and -+ differ");
    if (!close(y1(Quadrant::PM), y1(Quadrant::MM))) return fail("matching: first height of +- and -- differ");
    if (!close(xk(Quadrant::PP), xk(Quadrant::PM))) return fail("matching: last width of ++ and +- differ");
    if (!close(xk(Quadrant::MP), xk(Quadrant::MM))) return fail("matching: last width of -+ and -- differ");
    return {};
}

void require_valid(const StarPolygon& P) {
    const ValidationResult r = validate(P);
    if (!r.ok) throw DomainError("invalid polygon: " + r.message);
}

std::pair<int, int> step_indices(const StaircaseData& s, const Potential& V1, const Potential& V2, double E,
                                 double E1) {
    const int K = s.size();
    int kbar = K;
    for (int k = 1; k <= K; ++k)
        if (V1(s.xs[k - 1]) >= E1) {
            kbar = k;
            break;
        }
    int kunder = 1;
    for (int k = K; k >= 1; --k)
        if (V2(s.ys[k - 1]) >= E - E1) {
            kunder = k;
            break;
        }
    return {kbar, kunder};
}

BilliardTable build_table(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                          const QuadratureSpec& q) {
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("build_table: requires 0 < E1 < E");
    require_valid(P);
    require_admissible(V1);
    require_admissible(V2);

    const double E2 = E - E1;
    BilliardTable t;
    t.E = E;
    t.E1 = E1;
    t.w = quarter_period(V1, E1, q);
    t.h = quarter_period(V2, E2, q);

    for (Quadrant quad : kQuadrants) {
        const StaircaseData& s = P[quad];
        QuadrantTable& out = t.quadrants[static_cast<int>(quad)];
        std::tie(out.kbar, out.kunder) = step_indices(s, V1, V2, E, E1);
        if (out.is_rectangle()) {
            out.psi1 = {t.w};
            out.psi2 = {t.h};
            out.width_is_extremal = out.height_is_extremal = true;
            continue;
        }
        for (int k = out.kunder; k <= out.kbar; ++k) {
            const double x = s.xs[k - 1], y = s.ys[k - 1];
            if (k < out.kbar || V1(x) < E1) {
                out.psi1.push_back(psi(V1, x, E1, q));
            } else {
                out.psi1.push_back(t.w);
                out.width_is_extremal = true;
            }
            if (k > out.kunder || V2(y) < E2) {
                out.psi2.push_back(psi(V2, y, E2, q));
            } else {
                out.psi2.push_back(t.h);
                out.height_is_extremal = true;
            }
        }
    }
    return t;
}

int genus(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1) {
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("genus: requires 0 < E1 < E");
    int g = 1;
    for (Quadrant quad : kQuadrants) {
        const StaircaseData& s = P[quad];
        for (int k = 1; k < s.size(); ++k)
            if (V1(s.xs[k - 1]) < E1 && E1 < E - V2(s.ys[k])) ++g;
    }
    return g;
}

int g_max(const StarPolygon& P) {
    int total = 0;
    for (const auto& s : P.quadrants) total += s.size();
    return total - 3;
}

SingularityData singularity_data(const BilliardTable& table) {
    SingularityData out;
    for (Quadrant quad : kQuadrants) {
        const QuadrantTable& qt = table[quad];
        for (int j = 0; j < qt.concave_corners(); ++j) {
            Singularity s{quad, qt.first_step() + j, qt.psi1[j], qt.psi2[j + 1]};
            out.multiplicity_sum += s.multiplicity;
            out.singularities.push_back(s);
        }
    }
    out.genus = 1 + static_cast<int>(out.singularities.size());
    return out;
}

}  // namespace hisim
