#include "hisim/boundary.hpp"

#include <cmath>
#include <limits>

#include "hisim/errors.hpp"

namespace hisim {

int WallId::code() const {
    return static_cast<int>(quadrant) * 10000 + (vertical ? 0 : 5000) + (turning ? 4000 : 0) + step;
}

std::string WallId::str() const {
    std::string s(label(quadrant));
    s += vertical ? ":V" : ":H";
    s += turning ? "t" : std::to_string(step);
    return s;
}

namespace {

// Appends the walls and corners of one quadrant staircase with widths a (increasing) and
// heights b (decreasing); entry j is polygon step first_step + j.
void add_staircase(Boundary& B, Quadrant q, const std::vector<double>& a, const std::vector<double>& b, int first_step,
                   bool last_vertical_turning, bool first_horizontal_turning, int* next_singularity) {
    const int sx = sign_x(q), sy = sign_y(q);
    const int J = static_cast<int>(a.size());
    for (int j = 0; j < J; ++j) {
        const double below = j + 1 < J ? b[j + 1] : 0.0;
        const double left = j > 0 ? a[j - 1] : 0.0;
        Wall v{{q, true, first_step + j, j == J - 1 && last_vertical_turning}, sx * a[j], 0.0, 0.0, sx};
        v.lo = std::min(sy * below, sy * b[j]);
        v.hi = std::max(sy * below, sy * b[j]);
        Wall hz{{q, false, first_step + j, j == 0 && first_horizontal_turning}, sy * b[j], 0.0, 0.0, sy};
        hz.lo = std::min(sx * left, sx * a[j]);
        hz.hi = std::max(sx * left, sx * a[j]);
        B.walls.push_back(v);
        B.walls.push_back(hz);

        Corner convex;
        convex.p = Eigen::Vector2d(sx * a[j], sy * b[j]);
        convex.singular = !v.id.turning && !hz.id.turning;
        convex.quadrant = q;
        B.corners.push_back(convex);
        if (j + 1 < J) {
            Corner concave;
            concave.p = Eigen::Vector2d(sx * a[j], sy * b[j + 1]);
            concave.concave = true;
            concave.quadrant = q;
            concave.singularity = next_singularity ? (*next_singularity)++ : -1;
            B.corners.push_back(concave);
        }
    }
    B.widths[static_cast<int>(q)] = a;
    B.heights[static_cast<int>(q)] = b;
}

}  // namespace

Boundary table_boundary(const BilliardTable& table) {
    Boundary B;
    int singularity = 0;
    for (Quadrant q : kQuadrants) {
        const QuadrantTable& qt = table[q];
        add_staircase(B, q, qt.psi1, qt.psi2, qt.first_step(), qt.width_is_extremal, qt.height_is_extremal,
                      &singularity);
    }
    return B;
}

Boundary polygon_boundary(const StarPolygon& P) {
    Boundary B;
    for (Quadrant q : kQuadrants) add_staircase(B, q, P[q].xs, P[q].ys, 1, false, false, nullptr);
    return B;
}

RayHit Boundary::first_hit(const Eigen::Vector2d& p, const Eigen::Vector2d& d, double eps_corner) const {
    RayHit best;
    best.t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(walls.size()); ++i) {
        const Wall& w = walls[i];
        const int axis = w.id.vertical ? 0 : 1;
        const double dn = d[axis];
        if (dn * w.normal <= 0.0) continue;
        const double t = (w.c - p[axis]) / dn;
        if (!(t > 0.0) || t >= best.t) continue;
        const double along = p[1 - axis] + t * d[1 - axis];
        if (along < w.lo - eps_corner || along > w.hi + eps_corner) continue;
        best.t = t;
        best.wall = i;
    }
    if (best.wall < 0) throw DomainError("billiard: ray escapes the table (state outside the region)");

    const Eigen::Vector2d hit = p + best.t * d;
    for (int i = 0; i < static_cast<int>(corners.size()); ++i) {
        if ((corners[i].p - hit).cwiseAbs().maxCoeff() < eps_corner) {
            best.corner = i;
            break;
        }
    }
    return best;
}

double Boundary::concave_pass(const Eigen::Vector2d& p, const Eigen::Vector2d& d, double t_min, double t_max,
                              double eps, int* corner) const {
    double best = -1.0;
    const double dd = d.squaredNorm();
    for (int i = 0; i < static_cast<int>(corners.size()); ++i) {
        const Corner& c = corners[i];
        if (!c.concave) continue;
        const Eigen::Vector2d r = c.p - p;
        const double t = r.dot(d) / dd;
        if (t <= t_min || t > t_max) continue;
        const double dist = std::fabs(r[0] * d[1] - r[1] * d[0]) / std::sqrt(dd);
        if (dist < eps && (best < 0.0 || t < best)) {
            best = t;
            if (corner) *corner = i;
        }
    }
    return best;
}

int Boundary::nearest_wall(const Eigen::Vector2d& p, double* distance) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(walls.size()); ++i) {
        const Wall& w = walls[i];
        const int axis = w.id.vertical ? 0 : 1;
        const double along = p[1 - axis];
        const double gap = std::max({w.lo - along, along - w.hi, 0.0});
        const double dist = std::hypot(p[axis] - w.c, gap);
        if (dist < best_d) {
            best_d = dist;
            best = i;
        }
    }
    if (distance) *distance = best_d;
    return best;
}

bool Boundary::contains(const Eigen::Vector2d& p, double slack) const {
    for (Quadrant q : kQuadrants) {
        const int sx = sign_x(q), sy = sign_y(q);
        if (sx * p[0] < -slack || sy * p[1] < -slack) continue;
        const double ax = std::fabs(p[0]), ay = std::fabs(p[1]);
        const auto& a = widths[static_cast<int>(q)];
        const auto& b = heights[static_cast<int>(q)];
        for (std::size_t j = 0; j < a.size(); ++j)
            if (ax <= a[j] + slack && ay <= b[j] + slack) return true;
    }
    return false;
}

}  // namespace hisim
