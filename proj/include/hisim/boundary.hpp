#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hisim/geometry.hpp"

namespace hisim {

/// Identifies a boundary segment by quadrant, orientation and polygon step k. The same
/// id names a wall in configuration space and its image in the psi table, so impact
/// sequences of the two flows can be compared directly. Turning edges (where the table
/// is bounded by the projected rectangle rather than by a wall) carry `turning = true`.
struct WallId {
    Quadrant quadrant = Quadrant::PP;
    bool vertical = true;
    int step = 0;
    bool turning = false;

    int code() const;
    std::string str() const;
    bool operator==(const WallId&) const = default;
};

/// Axis-aligned segment. Vertical: x = c, y in [lo, hi]; horizontal: y = c, x in [lo, hi].
/// `normal` is the sign of the outward normal along the segment's normal axis.
struct Wall {
    WallId id;
    double c = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int normal = 1;
};

struct Corner {
    Eigen::Vector2d p;
    bool concave = false;
    /// False when one of the two edges is a turning edge: the corner is then a regular point
    /// of the level set and the flow reflects in both components.
    bool singular = true;
    int singularity = -1;  ///< index into singularity_data() for concave corners of a table
    Quadrant quadrant = Quadrant::PP;
};

struct RayHit {
    double t = 0.0;   ///< parameter along the direction vector
    int wall = -1;
    int corner = -1;  ///< >= 0 when the hit point is within eps of a corner
};

/// Rectilinear boundary of a star-shaped staircase region.
class Boundary {
public:
    std::vector<Wall> walls;
    std::vector<Corner> corners;

    /// First boundary crossing of p + t d for t > 0 through an outward-facing segment.
    RayHit first_hit(const Eigen::Vector2d& p, const Eigen::Vector2d& d, double eps_corner) const;

    /// Smallest t in (t_min, t_max] at which p + t d passes within eps of a concave corner,
    /// or -1 when there is none. Writes the corner index.
    double concave_pass(const Eigen::Vector2d& p, const Eigen::Vector2d& d, double t_min, double t_max, double eps,
                        int* corner) const;

    /// Nearest segment to a point (used to identify walls after event localization).
    int nearest_wall(const Eigen::Vector2d& p, double* distance = nullptr) const;

    /// Point-in-region test with slack (positive slack enlarges the region).
    bool contains(const Eigen::Vector2d& p, double slack = 0.0) const;

    std::array<std::vector<double>, 4> widths, heights;  ///< per-quadrant staircase used by contains()
};

/// Boundary of the psi-coordinate table.
Boundary table_boundary(const BilliardTable& table);

/// Boundary of the configuration-space polygon (all segments are walls).
Boundary polygon_boundary(const StarPolygon& P);

}  // namespace hisim
