#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hisim/flow.hpp"
#include "hisim/geometry.hpp"
#include "hisim/potential.hpp"
#include "hisim/resonance.hpp"

namespace hisim {

/// Uniform nx x ny cell mesh over a configuration-space box.
struct Grid {
    double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
    int nx = 64, ny = 64;

    /// Mesh over the projected rectangle [-x_max, x_max] x [-y_max, y_max] at (E, E1).
    static Grid rectangle(const Potential& V1, const Potential& V2, double E, double E1, int nx = 64, int ny = 64);
    double x_edge(int i) const { return i == nx ? x1 : x0 + (x1 - x0) * i / nx; }
    double y_edge(int j) const { return j == ny ? y1 : y0 + (y1 - y0) * j / ny; }
};

/// nx x ny array of per-cell values; entry (i, j) is the cell [x_i, x_{i+1}] x [y_j, y_{j+1}].
using CellField = Eigen::MatrixXd;

/// Cell edges of a grid expressed in psi coordinates at one level set.
struct PsiEdges {
    std::vector<double> psi1;  ///< nx + 1 increasing values in [-w, w]
    std::vector<double> psi2;
};
PsiEdges psi_edges(const Potential& V1, const Potential& V2, double E, double E1, const Grid& grid);

/// Cell masses of the projected invariant density g ~ [(E1 - V1)(E - E1 - V2)]^(-1/2) over the
/// full projected rectangle, normalized to 1. The density is integrated exactly through the
/// psi substitution, so edge cells carry their full (finite) singular weight.
CellField liouville_density(const Potential& V1, const Potential& V2, double E, double E1, const Grid& grid);
/// Same, restricted to the polygon P and normalized over R intersected with P.
CellField liouville_density(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                            const Grid& grid);

/// Time spent by the trajectory in each cell, from the exact psi-linear segments. `edges` are the
/// grid's cell edges at the trajectory's level set.
CellField occupancy(const BilliardTrajectory& traj, const PsiEdges& edges);

/// Calls fn(start_state, t0, duration) for each straight segment of the trajectory.
void for_each_segment(const BilliardTrajectory& traj, const std::function<void(const PsiState&, double, double)>& fn);

/// (1/T) integral of f(x(t), y(t)) dt. Throws DomainError if the orbit died at a corner.
double birkhoff_average(const BilliardTrajectory& traj, const std::function<double(double, double)>& f,
                        const Potential& V1, const Potential& V2, double E, double E1);
/// Grid-sampled version: f holds one value per cell.
double birkhoff_average(const BilliardTrajectory& traj, const CellField& f, const PsiEdges& edges);

struct EquidistributionReport {
    /// max over cells of |empirical - expected|, in units of the mean mass of a cell of positive
    /// expected mass (1 / number of such cells).
    double sup_cell_error = 0.0;
    bool passed = false;
    int active_cells = 0;
    CellField empirical;
    CellField expected;
};

/// Compares the pooled time occupancy of the ensemble with the Liouville cell masses on R and P.
EquidistributionReport equidistribution_test(const std::vector<BilliardTrajectory>& ensemble, const StarPolygon& P,
                                             const Potential& V1, const Potential& V2, double E, double E1,
                                             const Grid& grid, double tol = 5e-2);

struct ColourOccupancy {
    /// (empirical / expected) on cells inside both supports, over the same on cells inside exactly one.
    double ratio = 0.0;
    int double_cells = 0;
    int single_cells = 0;
    /// Cells inside exactly one of the supports for the direction copies ++ and +-.
    int symmetric_difference_cells = 0;
    /// Per-cell empirical / expected, 0 where the expected mass vanishes.
    CellField ratio_map;
    /// Per-cell number of the copies ++, +- whose support contains the whole cell (0, 1, 2), or -1
    /// for cells that straddle a support boundary or leave the table.
    Eigen::MatrixXi support_count;
};

/// Occupancy of one coloured component compared with g (chi_{++} + chi_{+-}).
ColourOccupancy red_green_occupancy(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1, Colour colour,
                                    const std::vector<BilliardTrajectory>& ensemble, const Grid& grid);

struct PeriodicResult {
    bool periodic = false;
    double period = 0.0;
    double error = 0.0;  ///< recurrence distance at the reported period
};

/// Recurrence test at rational multiples p/q (q <= 12) of the guess, up to the horizon.
/// Requires a horizon of at least 3 guesses; throws DomainError otherwise.
PeriodicResult periodic_detect(const BilliardTrajectory& traj, double period_guess, double tol = 1e-9);

/// `count` starts spread over the table: one jittered point from each of `count` distinct strata of a
/// square mesh over [-w, w] x [-h, h] holding at least 1% table area, at least `eps` (max norm) away
/// from every corner, with random directions. Member i uses its own generator derived from (seed, i).
std::vector<PsiState> stratified_starts(const BilliardTable& table, int count, std::uint64_t seed, double eps = 1e-6);

/// One jittered point per cell of an nx x ny mesh over the table, each with all four directions.
std::vector<PsiState> jittered_states(const BilliardTable& table, int nx, int ny, std::uint64_t seed,
                                      double eps = 1e-6);

}  // namespace hisim
