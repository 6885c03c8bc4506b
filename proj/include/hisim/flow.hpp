#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hisim/action_angle.hpp"
#include "hisim/boundary.hpp"
#include "hisim/geometry.hpp"
#include "hisim/potential.hpp"

namespace hisim {

inline constexpr double kEpsCorner = 1e-10;

/// Configuration-space state.
struct PhaseState {
    double x = 0.0, y = 0.0, px = 0.0, py = 0.0;
};

/// State in the psi table: position and the signs of the two velocity components.
struct PsiState {
    double psi1 = 0.0, psi2 = 0.0;
    int s1 = 1, s2 = 1;

    Eigen::Vector2d position() const { return {psi1, psi2}; }
    Eigen::Vector2d direction() const { return {double(s1), double(s2)}; }
};

enum class EventKind { Wall, Turning, CornerDeath };

template <class State>
struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Wall;
    WallId wall;
    State after;
};

template <class State>
struct Trajectory {
    State start;
    double t_end = 0.0;
    std::vector<Event<State>> events;
    std::vector<std::pair<double, State>> samples;
    bool died = false;
    double death_time = 0.0;
    /// False when turning reflections were left out; the event list then no longer
    /// determines the orbit between impacts.
    bool turning_recorded = true;

    /// End of the defined part of the orbit.
    double horizon() const { return died ? death_time : t_end; }

    /// Codes of the wall impacts (turning reflections excluded).
    std::vector<int> wall_codes() const {
        std::vector<int> out;
        for (const auto& e : events)
            if (e.kind == EventKind::Wall) out.push_back(e.wall.code());
        return out;
    }
    std::vector<double> wall_times() const {
        std::vector<double> out;
        for (const auto& e : events)
            if (e.kind == EventKind::Wall) out.push_back(e.time);
        return out;
    }
};

using BilliardTrajectory = Trajectory<PsiState>;
using PhysicalTrajectory = Trajectory<PhaseState>;

/// State of a billiard trajectory at time t (0 <= t <= horizon). Requires turning_recorded.
PsiState state_at(const BilliardTrajectory& traj, double t);

struct StepOutcome {
    double dt = 0.0;
    bool event = false;
    EventKind kind = EventKind::Wall;
    WallId wall;
    int corner = -1;
};

/// Exact straight-line motion in the psi table with elastic reflection.
class BilliardKernel {
public:
    /// With `regular_convex_corners`, convex wall-wall corners reflect both components instead
    /// of terminating the orbit (they are regular points of the unfolded surface).
    explicit BilliardKernel(const BilliardTable& table, double eps_corner = kEpsCorner,
                            bool regular_convex_corners = false);

    /// Moves s forward by at most dt_max, stopping at the first boundary event.
    /// Concave corners passed closer than eps at times > t_min terminate the step.
    StepOutcome advance(PsiState& s, double dt_max, double t_min = 0.0) const;

    const Boundary& boundary() const { return boundary_; }
    const BilliardTable& table() const { return table_; }

private:
    BilliardTable table_;
    Boundary boundary_;
    double eps_;
    bool regular_convex_;
};

struct BilliardOptions {
    double sample_dt = 0.0;     ///< uniform-time samples when positive
    bool record_turning = true; ///< also record reflections at turning edges
    bool stop_at_wall = false;  ///< stop at the first wall impact
};

/// Billiard flow in psi coordinates up to t_end or corner death.
BilliardTrajectory billiard_flow(const BilliardTable& table, const PsiState& start, double t_end,
                                 const BilliardOptions& opt = {});

/// Step-size control for the direct integration.
struct StepControl {
    double h0 = 1e-2;
    double tol = 1e-13;    ///< local error per step (max norm)
    double h_min = 1e-12;
    double h_max = 0.05;
    double event_tol = 1e-12;  ///< time resolution of wall-crossing localization
    double sample_dt = 0.0;
    double eps_corner = 1e-9;  ///< configuration-space corner neighbourhood
};

/// Direct integration of Hamilton's equations with elastic reflection, used to cross-check
/// the billiard flow. Adaptive RK4 with step doubling; wall crossings are localized by bisection.
PhysicalTrajectory physical_flow(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                                 const PhaseState& start, double t_end, const StepControl& ctl = {});

/// Coordinate change between phase space and the psi table on one level set.
class LevelSetMap {
public:
    LevelSetMap(const Potential& V1, const Potential& V2, double E, double E1, const QuadratureSpec& q = {});

    PsiState to_psi(const PhaseState& s) const;
    PhaseState from_psi(const PsiState& s) const;

    const PsiMap& first() const { return m1_; }
    const PsiMap& second() const { return m2_; }
    double E() const { return E_; }
    double E1() const { return E1_; }

private:
    PsiMap m1_, m2_;
    double E_, E1_;
};

PsiState to_psi(const PhaseState& s, const Potential& V1, const Potential& V2, double E, double E1);
PhaseState from_psi(const PsiState& s, const Potential& V1, const Potential& V2, double E, double E1);

struct SaddleConnection {
    int from = -1;  ///< singularity index (order of singularity_data)
    int to = -1;
    double length = 0.0;
    int s1 = 1, s2 = 1;  ///< outgoing direction at the start corner
};

/// Traces the outgoing separatrices of every concave corner up to length t_max and reports
/// those that end within eps of a concave corner.
std::vector<SaddleConnection> saddle_connection_search(const BilliardTable& table, double t_max,
                                                       double eps = kEpsCorner);

}  // namespace hisim
