#include "hisim/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hisim/action_angle.hpp"
#include "hisim/boundary.hpp"
#include "hisim/errors.hpp"
#include "hisim/parallel.hpp"
#include "hisim/quadrature.hpp"

namespace hisim {

namespace {

void check_level(double E, double E1) {
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("requires 0 < E1 < E");
}

void check_grid(const Grid& g) {
    if (g.nx < 1 || g.ny < 1 || !(g.x0 < g.x1) || !(g.y0 < g.y1)) throw DomainError("grid: empty or inverted mesh");
}

// psi-area of [a1, a2] x [b1, b2] (signed coordinates) inside the table.
double table_area(const BilliardTable& t, double a1, double a2, double b1, double b2) {
    double area = 0.0;
    for (Quadrant q : kQuadrants) {
        const int sx = sign_x(q), sy = sign_y(q);
        const double u1 = std::max(0.0, std::min(sx * a1, sx * a2)), u2 = std::max(sx * a1, sx * a2);
        const double v1 = std::max(0.0, std::min(sy * b1, sy * b2)), v2 = std::max(sy * b1, sy * b2);
        if (!(u1 < u2 && v1 < v2)) continue;
        const auto& qt = t[q];
        double left = 0.0;
        for (std::size_t j = 0; j < qt.psi1.size(); ++j) {
            const double ww = std::max(0.0, std::min(u2, qt.psi1[j]) - std::max(u1, left));
            const double hh = std::max(0.0, std::min(v2, qt.psi2[j]) - v1);
            area += ww * hh;
            left = qt.psi1[j];
        }
    }
    return area;
}

int locate(const std::vector<double>& edges, double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const int i = static_cast<int>(it - edges.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(edges.size()) - 2);
}

// Neumaier compensated sum; long orbits add up 10^5 and more terms.
struct Accumulator {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void require_alive(const BilliardTrajectory& traj) {
    if (traj.died)
        throw DomainError("orbit ended at a corner at T=" + std::to_string(traj.death_time) +
                          "; averages need a complete orbit");
    if (!(traj.t_end > 0.0)) throw DomainError("trajectory has zero length");
}

}  // namespace

Grid Grid::rectangle(const Potential& V1, const Potential& V2, double E, double E1, int nx, int ny) {
    check_level(E, E1);
    const double xm = x_max(V1, E1), ym = x_max(V2, E - E1);
    Grid g{-xm, xm, -ym, ym, nx, ny};
    check_grid(g);
    return g;
}

PsiEdges psi_edges(const Potential& V1, const Potential& V2, double E, double E1, const Grid& grid) {
    check_level(E, E1);
    check_grid(grid);
    const PsiMap m1(V1, E1), m2(V2, E - E1);
    auto edge = [](const PsiMap& m, double v) {
        const double xm = m.x_max();
        if (v >= xm) return m.quarter();
        if (v <= -xm) return -m.quarter();
        return m(v);
    };
    PsiEdges e;
    for (int i = 0; i <= grid.nx; ++i) e.psi1.push_back(edge(m1, grid.x_edge(i)));
    for (int j = 0; j <= grid.ny; ++j) e.psi2.push_back(edge(m2, grid.y_edge(j)));
    return e;
}

CellField liouville_density(const Potential& V1, const Potential& V2, double E, double E1, const Grid& grid) {
    const PsiEdges e = psi_edges(V1, V2, E, E1, grid);
    CellField out(grid.nx, grid.ny);
    const double full = 4.0 * quarter_period(V1, E1) * quarter_period(V2, E - E1);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            out(i, j) = (e.psi1[i + 1] - e.psi1[i]) * (e.psi2[j + 1] - e.psi2[j]) / full;
    return out;
}

CellField liouville_density(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                            const Grid& grid) {
    const BilliardTable t = build_table(P, V1, V2, E, E1);
    const PsiEdges e = psi_edges(V1, V2, E, E1, grid);
    const double total = table_area(t, -t.w, t.w, -t.h, t.h);
    CellField out(grid.nx, grid.ny);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            out(i, j) = table_area(t, e.psi1[i], e.psi1[i + 1], e.psi2[j], e.psi2[j + 1]) / total;
    return out;
}

void for_each_segment(const BilliardTrajectory& traj, const std::function<void(const PsiState&, double, double)>& fn) {
    if (!traj.turning_recorded) throw DomainError("trajectory was recorded without turning events");
    PsiState s = traj.start;
    double t = 0.0;
    const double end = traj.horizon();
    for (const auto& e : traj.events) {
        if (e.time > t) fn(s, t, std::min(e.time, end) - t);
        s = e.after;
        t = e.time;
        if (t >= end) return;
    }
    if (end > t) fn(s, t, end - t);
}

CellField occupancy(const BilliardTrajectory& traj, const PsiEdges& edges) {
    const int nx = static_cast<int>(edges.psi1.size()) - 1, ny = static_cast<int>(edges.psi2.size()) - 1;
    CellField out = CellField::Zero(nx, ny);
    std::vector<double> cuts;
    auto add_cuts = [&](const std::vector<double>& ed, double a, int dir, double len) {
        const double b = a + dir * len;
        const double lo = std::min(a, b), hi = std::max(a, b);
        auto it = std::upper_bound(ed.begin(), ed.end(), lo);
        for (; it != ed.end() && *it < hi; ++it) cuts.push_back((*it - a) * dir);
    };
    for_each_segment(traj, [&](const PsiState& s, double, double len) {
        cuts.assign({0.0, len});
        add_cuts(edges.psi1, s.psi1, s.s1, len);
        add_cuts(edges.psi2, s.psi2, s.s2, len);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double d = cuts[k + 1] - cuts[k];
            if (d <= 0.0) continue;
            const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            out(locate(edges.psi1, s.psi1 + s.s1 * mid), locate(edges.psi2, s.psi2 + s.s2 * mid)) += d;
        }
    });
    return out;
}

double birkhoff_average(const BilliardTrajectory& traj, const std::function<double(double, double)>& f,
                        const Potential& V1, const Potential& V2, double E, double E1) {
    require_alive(traj);
    check_level(E, E1);
    const PsiMap m1(V1, E1), m2(V2, E - E1);
    const GaussRule& g = gauss_legendre(8);
    constexpr double chunk = 0.25;
    Accumulator sum;
    for_each_segment(traj, [&](const PsiState& s, double, double len) {
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / chunk)));
        const double h = len / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double mid = (p + 0.5) * h;
            for (Eigen::Index k = 0; k < g.nodes.size(); ++k) {
                const double tau = mid + 0.5 * h * g.nodes[k];
                sum.add(0.5 * h * g.weights[k] * f(m1.inverse(s.psi1 + s.s1 * tau), m2.inverse(s.psi2 + s.s2 * tau)));
            }
        }
    });
    return sum.value() / traj.t_end;
}

double birkhoff_average(const BilliardTrajectory& traj, const CellField& f, const PsiEdges& edges) {
    require_alive(traj);
    const CellField occ = occupancy(traj, edges);
    if (f.rows() != occ.rows() || f.cols() != occ.cols()) throw DomainError("birkhoff_average: field shape mismatch");
    return (occ.array() * f.array()).sum() / traj.t_end;
}

EquidistributionReport equidistribution_test(const std::vector<BilliardTrajectory>& ensemble, const StarPolygon& P,
                                             const Potential& V1, const Potential& V2, double E, double E1,
                                             const Grid& grid, double tol) {
    if (ensemble.empty()) throw DomainError("equidistribution_test: empty ensemble");
    const PsiEdges edges = psi_edges(V1, V2, E, E1, grid);
    EquidistributionReport r;
    r.expected = liouville_density(P, V1, V2, E, E1, grid);
    r.empirical = CellField::Zero(grid.nx, grid.ny);
    double total = 0.0;
    for (const auto& traj : ensemble) {
        require_alive(traj);
        r.empirical += occupancy(traj, edges);
        total += traj.t_end;
    }
    r.empirical /= total;
    r.active_cells = static_cast<int>((r.expected.array() > 0.0).count());
    r.sup_cell_error = (r.empirical - r.expected).cwiseAbs().maxCoeff() * r.active_cells;
    r.passed = r.sup_cell_error < tol;
    return r;
}

ColourOccupancy red_green_occupancy(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1, Colour colour,
                                    const std::vector<BilliardTrajectory>& ensemble, const Grid& grid) {
    if (ensemble.empty()) throw DomainError("red_green_occupancy: empty ensemble");
    const Potential V1 = spec.V1(), V2 = spec.V2();
    const TorusChart chart(P, spec, E, E1);
    const BilliardTable table = build_table(P, V1, V2, E, E1);
    const PsiEdges edges = psi_edges(V1, V2, E, E1, grid);
    const CellField expected = liouville_density(P, V1, V2, E, E1, grid);
    CellField emp = CellField::Zero(grid.nx, grid.ny);
    double total = 0.0;
    for (const auto& traj : ensemble) {
        require_alive(traj);
        emp += occupancy(traj, edges);
        total += traj.t_end;
    }
    emp /= total;

    ColourOccupancy out;
    out.ratio_map = CellField::Zero(grid.nx, grid.ny);
    out.support_count = Eigen::MatrixXi::Constant(grid.nx, grid.ny, -1);
    const double full = table_area(table, edges.psi1[0], edges.psi1[grid.nx], edges.psi2[0], edges.psi2[grid.ny]);
    constexpr int S = 5;
    double mass[3] = {0, 0, 0}, g[3] = {0, 0, 0};
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            if (expected(i, j) > 0.0) out.ratio_map(i, j) = emp(i, j) / expected(i, j);
            const double a1 = edges.psi1[i], a2 = edges.psi1[i + 1], b1 = edges.psi2[j], b2 = edges.psi2[j + 1];
            // Only cells wholly inside the table and on one side of every support boundary count.
            if (!(expected(i, j) * full >= (a2 - a1) * (b2 - b1) * (1.0 - 1e-12))) continue;
            int in_pp = 0, in_pm = 0;
            for (int u = 0; u <= S; ++u)
                for (int v = 0; v <= S; ++v) {
                    const double p1 = a1 + (a2 - a1) * u / S, p2 = b1 + (b2 - b1) * v / S;
                    in_pp += chart.in_support(colour, p1, p2, 1, 1);
                    in_pm += chart.in_support(colour, p1, p2, 1, -1);
                }
            const int all = (S + 1) * (S + 1);
            if ((in_pp != 0 && in_pp != all) || (in_pm != 0 && in_pm != all)) continue;
            const int count = (in_pp == all) + (in_pm == all);
            out.support_count(i, j) = count;
            mass[count] += emp(i, j);
            g[count] += expected(i, j);
            if (count == 1) ++out.symmetric_difference_cells;
        }
    out.double_cells = static_cast<int>((out.support_count.array() == 2).count());
    out.single_cells = static_cast<int>((out.support_count.array() == 1).count());
    if (g[2] > 0.0 && g[1] > 0.0 && mass[1] > 0.0) out.ratio = (mass[2] / g[2]) / (mass[1] / g[1]);
    return out;
}

PeriodicResult periodic_detect(const BilliardTrajectory& traj, double period_guess, double tol) {
    if (!(period_guess > 0.0)) throw DomainError("periodic_detect: period guess must be positive");
    const double H = traj.horizon();
    if (H < 3.0 * period_guess * (1.0 - 1e-12))
        throw DomainError("periodic_detect: trajectory shorter than three period guesses");
    auto dist = [&](double t) {
        const PsiState s = state_at(traj, t);
        if (s.s1 != traj.start.s1 || s.s2 != traj.start.s2) return std::numeric_limits<double>::infinity();
        return std::max(std::fabs(s.psi1 - traj.start.psi1), std::fabs(s.psi2 - traj.start.psi2));
    };
    std::vector<double> cands;
    for (int q = 1; q <= 12; ++q)
        for (int p = 1; p * period_guess <= q * H * (1.0 + 1e-12); ++p) cands.push_back(period_guess * p / q);
    std::sort(cands.begin(), cands.end());
    PeriodicResult r;
    for (double T : cands) {
        if (T > H * (1.0 + 1e-12)) break;
        // A period must recur at every multiple inside the horizon.
        double worst = 0.0;
        for (double k = 1; k * T <= H * (1.0 + 1e-12) && worst <= tol; ++k) worst = std::max(worst, dist(std::min(k * T, H)));
        if (worst <= tol) {
            r.periodic = true;
            r.period = T;
            r.error = worst;
            return r;
        }
    }
    return r;
}

namespace {

bool near_corner(const Boundary& B, const Eigen::Vector2d& p, double eps) {
    for (const Corner& c : B.corners)
        if ((c.p - p).cwiseAbs().maxCoeff() < eps) return true;
    return false;
}

// Uniform point in the stratum [x0, x1] x [y0, y1] that lies in the table, or false after many tries.
bool draw_in_stratum(std::mt19937_64& rng, const Boundary& B, double x0, double x1, double y0, double y1, double eps,
                     Eigen::Vector2d& out) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 4096; ++attempt) {
        const Eigen::Vector2d p(x0 + (x1 - x0) * u(rng), y0 + (y1 - y0) * u(rng));
        if (B.contains(p, -eps) && !near_corner(B, p, eps)) {
            out = p;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<PsiState> stratified_starts(const BilliardTable& table, int count, std::uint64_t seed, double eps) {
    if (count < 1) throw DomainError("stratified_starts: count must be positive");
    const Boundary B = table_boundary(table);
    // Strata with table area, on the coarsest square mesh that has at least `count` of them.
    for (int k = static_cast<int>(std::ceil(std::sqrt(double(count))));; ++k) {
        std::vector<std::pair<int, int>> strata;
        const double dx = 2.0 * table.w / k, dy = 2.0 * table.h / k;
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i)
                if (table_area(table, -table.w + i * dx, -table.w + (i + 1) * dx, -table.h + j * dy,
                               -table.h + (j + 1) * dy) > 1e-2 * dx * dy)
                    strata.emplace_back(i, j);
        if (static_cast<int>(strata.size()) < count) continue;
        std::vector<PsiState> out;
        for (int m = 0; m < count; ++m) {
            const auto [i, j] = strata[static_cast<std::size_t>(m) * strata.size() / count];
            std::mt19937_64 rng = member_rng(seed, m);
            Eigen::Vector2d p;
            if (!draw_in_stratum(rng, B, -table.w + i * dx, -table.w + (i + 1) * dx, -table.h + j * dy,
                                 -table.h + (j + 1) * dy, eps, p))
                throw DomainError("stratified_starts: could not place a start in its stratum");
            std::bernoulli_distribution coin(0.5);
            out.push_back({p[0], p[1], coin(rng) ? 1 : -1, coin(rng) ? 1 : -1});
        }
        return out;
    }
}

std::vector<PsiState> jittered_states(const BilliardTable& table, int nx, int ny, std::uint64_t seed, double eps) {
    if (nx < 1 || ny < 1) throw DomainError("jittered_states: mesh must be nonempty");
    const Boundary B = table_boundary(table);
    const double dx = 2.0 * table.w / nx, dy = 2.0 * table.h / ny;
    std::vector<PsiState> out;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            std::mt19937_64 rng = member_rng(seed, static_cast<std::uint64_t>(j) * nx + i);
            Eigen::Vector2d p;
            if (!draw_in_stratum(rng, B, -table.w + i * dx, -table.w + (i + 1) * dx, -table.h + j * dy,
                                 -table.h + (j + 1) * dy, eps, p))
                continue;
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) out.push_back({p[0], p[1], s1, s2});
        }
    return out;
}

}  // namespace hisim
