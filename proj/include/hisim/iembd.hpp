#pragma once

#include <string>
#include <vector>

#include "hisim/geometry.hpp"
#include "hisim/intervals.hpp"
#include "hisim/potential.hpp"

namespace hisim {

/// A critical partial energy with the number of (quadrant, step) sources that produce it.
struct Breakpoint {
    double value = 0.0;
    int multiplicity = 1;
};

struct LabelledInterval {
    double lo = 0.0;
    double hi = 0.0;
    int genus = 1;
    bool nonimpacting = false;
    bool interior_impact = false;
    bool touches_extremal_vertical = false;
    bool touches_extremal_horizontal = false;
};

/// Partition of (0, E) into open intervals of constant topological data.
struct EnergyPartition {
    double E = 0.0;
    std::vector<Breakpoint> breakpoints;
    std::vector<LabelledInterval> intervals;
};

EnergyPartition partition(const StarPolygon& P, const Potential& V1, const Potential& V2, double E);

/// Partial energies E1 for which the projected rectangle fits inside P.
IntervalSet nonimpacting_set(const StarPolygon& P, const Potential& V1, const Potential& V2, double E);

/// Partial energies with impacts, none of them on an extremal side.
IntervalSet interior_impact_set(const StarPolygon& P, const Potential& V1, const Potential& V2, double E);

/// E1 above which some orbit reaches an extremal vertical side: min over quadrants of V1(x_K).
double extremal_vertical_threshold(const StarPolygon& P, const Potential& V1);
/// Min over quadrants of V2(y_1); extremal horizontal sides are reached once E - E1 exceeds it.
double extremal_horizontal_threshold(const StarPolygon& P, const Potential& V2);

/// Largest E for which no orbit of any E1 impacts a wall.
double low_energy_bound(const StarPolygon& P, const Potential& V1, const Potential& V2);
/// Smallest E from which every E1 touches an extremal side.
double high_energy_bound(const StarPolygon& P, const Potential& V1, const Potential& V2);

enum class Region { NoImpact, Interior, ExtremalVertical, ExtremalHorizontal, ExtremalBoth };
std::string_view region_name(Region r);

enum class WedgeKind { Corner, ExtremalVertical, ExtremalHorizontal };

/// Region of the (E, E1) plane bounded below by E1 = e1_lo and above by E1 = E - e2_lo.
/// Corner wedges come from a concave corner (x_k, y_{k+1}); extremal wedges have one open side.
/// Coincident wedges from different quadrants are merged and counted in `multiplicity`.
struct Wedge {
    WedgeKind kind = WedgeKind::Corner;
    double e1_lo = 0.0;  ///< V1(x_k), or V1(x_K) for an extremal vertical wedge
    double e2_lo = 0.0;  ///< V2(y_{k+1}), or V2(y_1) for an extremal horizontal wedge
    int multiplicity = 1;
    std::vector<Quadrant> quadrants;
    double apex() const { return e1_lo + e2_lo; }
    /// Boundary polyline in (E, E1) up to energy e_max.
    std::vector<std::pair<double, double>> polyline(double e_max) const;
    bool covers(double E, double E1) const;
};

std::vector<Wedge> wedges(const StarPolygon& P, const Potential& V1, const Potential& V2);

struct DiagramCell {
    double E = 0.0;
    double E1 = 0.0;
    int genus = 1;
    int corner_wedges = 0;  ///< with multiplicity
    Region region = Region::NoImpact;
};

struct Diagram {
    double e_min = 0.0;
    double e_max = 0.0;
    int resolution = 0;
    std::vector<DiagramCell> cells;  ///< row-major, E1 rows from the bottom; cells with E1 >= E omitted
    std::vector<Wedge> wedges;
};

/// Labels a resolution x resolution grid over [e_min, e_max] x [0, e_max].
Diagram diagram(const StarPolygon& P, const Potential& V1, const Potential& V2, double e_min, double e_max,
                int resolution, unsigned workers = 0);

std::string diagram_csv(const Diagram& d);
std::string diagram_svg(const Diagram& d);

}  // namespace hisim
