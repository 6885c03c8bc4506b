#include "hisim/flow.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include "hisim/errors.hpp"

namespace hisim {

PsiState state_at(const BilliardTrajectory& traj, double t) {
    if (!traj.turning_recorded) throw DomainError("state_at: trajectory was recorded without turning events");
    PsiState s = traj.start;
    double t0 = 0.0;
    auto it = std::upper_bound(traj.events.begin(), traj.events.end(), t,
                               [](double v, const Event<PsiState>& e) { return v < e.time; });
    if (it != traj.events.begin()) {
        const auto& e = *std::prev(it);
        s = e.after;
        t0 = e.time;
    }
    s.psi1 += (t - t0) * s.s1;
    s.psi2 += (t - t0) * s.s2;
    return s;
}

BilliardKernel::BilliardKernel(const BilliardTable& table, double eps_corner, bool regular_convex_corners)
    : table_(table), boundary_(table_boundary(table)), eps_(eps_corner), regular_convex_(regular_convex_corners) {}

StepOutcome BilliardKernel::advance(PsiState& s, double dt_max, double t_min) const {
    const Eigen::Vector2d p = s.position();
    const Eigen::Vector2d d = s.direction();
    const RayHit hit = boundary_.first_hit(p, d, eps_);

    StepOutcome out;
    int concave = -1;
    const double tc = boundary_.concave_pass(p, d, t_min, std::min(hit.t, dt_max), eps_, &concave);
    if (tc >= 0.0) {
        const Eigen::Vector2d& c = boundary_.corners[concave].p;
        s.psi1 = c[0];
        s.psi2 = c[1];
        out.dt = tc;
        out.event = true;
        out.kind = EventKind::CornerDeath;
        out.corner = concave;
        return out;
    }
    if (hit.t > dt_max) {
        s.psi1 += dt_max * s.s1;
        s.psi2 += dt_max * s.s2;
        out.dt = dt_max;
        return out;
    }

    const Wall& w = boundary_.walls[hit.wall];
    out.dt = hit.t;
    out.event = true;
    out.wall = w.id;
    out.kind = w.id.turning ? EventKind::Turning : EventKind::Wall;
    s.psi1 += hit.t * s.s1;
    s.psi2 += hit.t * s.s2;

    if (hit.corner >= 0) {
        const Corner& c = boundary_.corners[hit.corner];
        s.psi1 = c.p[0];
        s.psi2 = c.p[1];
        out.corner = hit.corner;
        if (c.concave || (c.singular && !regular_convex_)) {
            out.kind = EventKind::CornerDeath;
            return out;
        }
        // Regular corner: the orbit reverses both components. Report the wall edge if there is one.
        if (w.id.turning) {
            for (const Wall& other : boundary_.walls) {
                if (other.id.turning || other.id.vertical == w.id.vertical) continue;
                const int axis = other.id.vertical ? 0 : 1;
                if (std::fabs(c.p[axis] - other.c) < eps_ && c.p[1 - axis] >= other.lo - eps_ &&
                    c.p[1 - axis] <= other.hi + eps_) {
                    out.wall = other.id;
                    out.kind = EventKind::Wall;
                    break;
                }
            }
        }
        s.s1 = -s.s1;
        s.s2 = -s.s2;
        return out;
    }
    if (w.id.vertical) {
        s.psi1 = w.c;
        s.s1 = -s.s1;
    } else {
        s.psi2 = w.c;
        s.s2 = -s.s2;
    }
    return out;
}

BilliardTrajectory billiard_flow(const BilliardTable& table, const PsiState& start, double t_end,
                                 const BilliardOptions& opt) {
    if (std::abs(start.s1) != 1 || std::abs(start.s2) != 1) throw DomainError("billiard_flow: direction signs must be +-1");
    if (!(t_end >= 0.0)) throw DomainError("billiard_flow: t_end must be nonnegative");
    const BilliardKernel kernel(table);
    if (!kernel.boundary().contains(start.position(), 1e-12))
        throw DomainError("billiard_flow: start is outside the table");

    BilliardTrajectory traj;
    traj.start = start;
    traj.t_end = t_end;
    traj.turning_recorded = opt.record_turning;
    PsiState s = start;
    double t = 0.0;
    double next_sample = 0.0;
    auto emit_samples = [&](const PsiState& from, double t_from, double t_to) {
        if (opt.sample_dt <= 0.0) return;
        while (next_sample <= t_to + 1e-15 && next_sample <= t_end) {
            PsiState q = from;
            q.psi1 += (next_sample - t_from) * from.s1;
            q.psi2 += (next_sample - t_from) * from.s2;
            traj.samples.emplace_back(next_sample, q);
            next_sample += opt.sample_dt;
        }
    };

    while (t < t_end) {
        const PsiState before = s;
        const StepOutcome out = kernel.advance(s, t_end - t);
        PsiState seg_start = before;
        emit_samples(seg_start, t, t + out.dt);
        t += out.dt;
        if (!out.event) break;
        if (out.kind == EventKind::CornerDeath) {
            traj.died = true;
            traj.death_time = t;
            traj.events.push_back({t, EventKind::CornerDeath, out.wall, s});
            break;
        }
        if (out.kind == EventKind::Turning && !opt.record_turning) continue;
        traj.events.push_back({t, out.kind, out.wall, s});
        if (opt.stop_at_wall && out.kind == EventKind::Wall) {
            traj.t_end = t;
            break;
        }
    }
    return traj;
}

namespace {

using Vec4 = Eigen::Vector4d;

struct Rhs {
    const Potential& V1;
    const Potential& V2;
    Vec4 operator()(const Vec4& y) const { return {y[2], y[3], -V1.d1(y[0]), -V2.d1(y[1])}; }
};

Vec4 rk4(const Rhs& f, const Vec4& y, double h) {
    const Vec4 k1 = f(y);
    const Vec4 k2 = f(y + 0.5 * h * k1);
    const Vec4 k3 = f(y + 0.5 * h * k2);
    const Vec4 k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Two half steps with Richardson extrapolation against one full step.
Vec4 step_pair(const Rhs& f, const Vec4& y, double h, double* err) {
    const Vec4 full = rk4(f, y, h);
    const Vec4 half = rk4(f, rk4(f, y, 0.5 * h), 0.5 * h);
    const Vec4 diff = (half - full) / 15.0;
    if (err) *err = diff.cwiseAbs().maxCoeff();
    return half + diff;
}

PhaseState to_phase(const Vec4& y) { return {y[0], y[1], y[2], y[3]}; }

}  // namespace

PhysicalTrajectory physical_flow(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                                 const PhaseState& start, double t_end, const StepControl& ctl) {
    require_valid(P);
    require_admissible(V1);
    require_admissible(V2);
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("physical_flow: requires 0 < E1 < E");
    const double h1 = 0.5 * start.px * start.px + V1(start.x);
    const double h2 = 0.5 * start.py * start.py + V2(start.y);
    if (std::fabs(h1 - E1) > 1e-9 * std::max(1.0, E1) || std::fabs(h2 - (E - E1)) > 1e-9 * std::max(1.0, E - E1))
        throw DomainError("physical_flow: start is not on the level set");

    const Boundary B = polygon_boundary(P);
    if (!B.contains({start.x, start.y}, 1e-12)) throw DomainError("physical_flow: start is outside the polygon");
    const Rhs f{V1, V2};
    auto inside = [&](const Vec4& y) { return B.contains({y[0], y[1]}); };

    PhysicalTrajectory traj;
    traj.start = start;
    traj.t_end = t_end;
    Vec4 y(start.x, start.y, start.px, start.py);
    double t = 0.0;
    double h = ctl.h0;
    double next_sample = 0.0;

    while (t < t_end) {
        h = std::min({h, ctl.h_max, t_end - t});
        double err = 0.0;
        Vec4 cand = step_pair(f, y, h, &err);
        if (err > ctl.tol && h > ctl.h_min) {
            h = std::max(ctl.h_min, h * std::max(0.2, 0.9 * std::pow(ctl.tol / err, 0.2)));
            continue;
        }
        if (err > ctl.tol) throw std::runtime_error("physical_flow: step size underflow at t=" + std::to_string(t));

        // Walls are detected individually so a step that clips a concave corner, with both ends
        // inside the polygon, still registers the crossing.
        double taken = h;
        int hit = -1;
        for (std::size_t i = 0; i < B.walls.size(); ++i) {
            const Wall& w = B.walls[i];
            const int ax = w.id.vertical ? 0 : 1;
            auto gap = [&](const Vec4& z) { return w.normal * (w.c - z[ax]); };
            if (gap(cand) >= 0.0 || gap(y) < -1e-10) continue;
            double lo = 0.0, hi = h;
            while (hi - lo > ctl.event_tol) {
                const double mid = 0.5 * (lo + hi);
                (gap(step_pair(f, y, mid, nullptr)) >= 0.0 ? lo : hi) = mid;
            }
            const double other = step_pair(f, y, hi, nullptr)[1 - ax];
            if (other < w.lo - 1e-9 || other > w.hi + 1e-9 || lo >= taken) continue;
            taken = lo;
            hit = static_cast<int>(i);
        }
        if (hit < 0 && !inside(cand)) {
            double lo = 0.0, hi = h;
            while (hi - lo > ctl.event_tol) {
                const double mid = 0.5 * (lo + hi);
                (inside(step_pair(f, y, mid, nullptr)) ? lo : hi) = mid;
            }
            taken = lo;
            const Vec4 out = step_pair(f, y, hi, nullptr);
            hit = static_cast<int>(B.nearest_wall({out[0], out[1]}));
        }
        const bool crossed = hit >= 0;
        if (crossed) cand = step_pair(f, y, taken, nullptr);

        if (ctl.sample_dt > 0.0) {
            while (next_sample <= t + taken && next_sample <= t_end) {
                const double tau = next_sample - t;
                traj.samples.emplace_back(next_sample, to_phase(tau > 0.0 ? step_pair(f, y, tau, nullptr) : y));
                next_sample += ctl.sample_dt;
            }
        }
        y = cand;
        t += taken;

        if (crossed) {
            const Vec4 out = step_pair(f, y, ctl.event_tol, nullptr);
            const Eigen::Vector2d pos(out[0], out[1]);
            for (const Corner& c : B.corners) {
                if ((c.p - pos).cwiseAbs().maxCoeff() < ctl.eps_corner) {
                    traj.died = true;
                    traj.death_time = t;
                    traj.events.push_back({t, EventKind::CornerDeath, WallId{}, to_phase(y)});
                    return traj;
                }
            }
            const Wall& w = B.walls[hit];
            y[w.id.vertical ? 2 : 3] = -y[w.id.vertical ? 2 : 3];
            traj.events.push_back({t, EventKind::Wall, w.id, to_phase(y)});
        } else {
            h = std::min(ctl.h_max, h * std::min(4.0, 0.9 * std::pow(ctl.tol / std::max(err, 1e-300), 0.2)));
        }
    }
    return traj;
}

LevelSetMap::LevelSetMap(const Potential& V1, const Potential& V2, double E, double E1, const QuadratureSpec& q)
    : m1_(V1, E1, q), m2_(V2, E - E1, q), E_(E), E1_(E1) {
    if (!(E1 > 0.0 && E1 < E)) throw DomainError("level set requires 0 < E1 < E");
}

PsiState LevelSetMap::to_psi(const PhaseState& s) const {
    const double h1 = 0.5 * s.px * s.px + m1_.potential()(s.x);
    const double h2 = 0.5 * s.py * s.py + m2_.potential()(s.y);
    if (std::fabs(h1 - E1_) > 1e-9 * std::max(1.0, E1_) || std::fabs(h2 - (E_ - E1_)) > 1e-9 * std::max(1.0, E_ - E1_))
        throw DomainError("to_psi: state is not on the level set");
    PsiState out;
    out.psi1 = m1_.from_state(s.x, s.px);
    out.psi2 = m2_.from_state(s.y, s.py);
    out.s1 = s.px > 0.0 ? 1 : s.px < 0.0 ? -1 : (s.x > 0.0 ? -1 : 1);
    out.s2 = s.py > 0.0 ? 1 : s.py < 0.0 ? -1 : (s.y > 0.0 ? -1 : 1);
    return out;
}

PhaseState LevelSetMap::from_psi(const PsiState& s) const {
    return {m1_.inverse(s.psi1), m2_.inverse(s.psi2), s.s1 * m1_.speed_at(s.psi1), s.s2 * m2_.speed_at(s.psi2)};
}

PsiState to_psi(const PhaseState& s, const Potential& V1, const Potential& V2, double E, double E1) {
    return LevelSetMap(V1, V2, E, E1).to_psi(s);
}

PhaseState from_psi(const PsiState& s, const Potential& V1, const Potential& V2, double E, double E1) {
    return LevelSetMap(V1, V2, E, E1).from_psi(s);
}

std::vector<SaddleConnection> saddle_connection_search(const BilliardTable& table, double t_max, double eps) {
    const BilliardKernel kernel(table, eps, true);
    const Boundary& B = kernel.boundary();
    std::vector<SaddleConnection> out;
    for (const Corner& c : B.corners) {
        if (!c.concave) continue;
        const int ex = sign_x(c.quadrant), ey = sign_y(c.quadrant);
        for (int s1 : {1, -1})
            for (int s2 : {1, -1}) {
                if (s1 == ex && s2 == ey) continue;  // points out of the table
                PsiState s{c.p[0], c.p[1], s1, s2};
                double t = 0.0;
                bool first = true;
                while (t < t_max) {
                    const StepOutcome step = kernel.advance(s, t_max - t, first ? 1e-9 : 0.0);
                    first = false;
                    t += step.dt;
                    if (!step.event) break;
                    if (step.kind == EventKind::CornerDeath) {
                        const Corner& end = B.corners[step.corner];
                        if (end.concave) out.push_back({c.singularity, end.singularity, t, s1, s2});
                        break;
                    }
                }
            }
    }
    return out;
}

}  // namespace hisim
