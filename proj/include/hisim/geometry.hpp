#pragma once

#include <array>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "hisim/action_angle.hpp"
#include "hisim/potential.hpp"

namespace hisim {

/// Quadrant label (sign of x, sign of y).
enum class Quadrant : int { PP = 0, PM = 1, MP = 2, MM = 3 };

inline constexpr std::array<Quadrant, 4> kQuadrants{Quadrant::PP, Quadrant::PM, Quadrant::MP, Quadrant::MM};

constexpr int sign_x(Quadrant q) { return (q == Quadrant::PP || q == Quadrant::PM) ? 1 : -1; }
constexpr int sign_y(Quadrant q) { return (q == Quadrant::PP || q == Quadrant::MP) ? 1 : -1; }
constexpr Quadrant quadrant_of(int sx, int sy) {
    return sx > 0 ? (sy > 0 ? Quadrant::PP : Quadrant::PM) : (sy > 0 ? Quadrant::MP : Quadrant::MM);
}
std::string_view label(Quadrant q);
/// Parses "++", "+-", "-+", "--"; throws DomainError otherwise.
Quadrant parse_quadrant(std::string_view s);

/// One quadrant of the polygon: the union of rectangles [0, xs[i]] x [0, ys[i]].
struct StaircaseData {
    std::vector<double> xs;  ///< strictly increasing
    std::vector<double> ys;  ///< strictly decreasing

    int size() const { return static_cast<int>(xs.size()); }
};

/// Star-shaped right-angled polygon, one staircase per quadrant (mirrored by the quadrant signs).
struct StarPolygon {
    std::array<StaircaseData, 4> quadrants;

    const StaircaseData& operator[](Quadrant q) const { return quadrants[static_cast<int>(q)]; }
    StaircaseData& operator[](Quadrant q) { return quadrants[static_cast<int>(q)]; }

    /// Same staircase in all four quadrants.
    static StarPolygon symmetric(const StaircaseData& s);
};

struct ValidationResult {
    bool ok = true;
    std::string message;
};

/// Checks staircase monotonicity (gaps above 1e-12 relative) and the four matching conditions.
ValidationResult validate(const StarPolygon& P);

/// Throws DomainError with the validation message when P is invalid.
void require_valid(const StarPolygon& P);

/// Clipped staircase of one quadrant in psi coordinates.
///
/// Entries correspond to the polygon steps kunder..kbar (1-based). When kunder > kbar the
/// quadrant is the full rectangle [0, w] x [0, h] and both flags are set.
struct QuadrantTable {
    int kbar = 1;
    int kunder = 1;
    std::vector<double> psi1;          ///< increasing widths
    std::vector<double> psi2;          ///< decreasing heights
    bool width_is_extremal = false;    ///< last psi1 entry is the turning value w (no wall there)
    bool height_is_extremal = false;   ///< first psi2 entry is the turning value h (no wall there)

    bool is_rectangle() const { return kunder > kbar; }
    int first_step() const { return is_rectangle() ? 0 : kunder; }
    int concave_corners() const { return static_cast<int>(psi1.size()) - 1; }
};

/// The polygon P intersected with the projected rectangle at (E, E1), in psi coordinates.
struct BilliardTable {
    std::array<QuadrantTable, 4> quadrants;
    double w = 0.0;  ///< quarter period of the first oscillator at E1
    double h = 0.0;  ///< quarter period of the second oscillator at E - E1
    double E = 0.0;
    double E1 = 0.0;

    const QuadrantTable& operator[](Quadrant q) const { return quadrants[static_cast<int>(q)]; }
};

/// Builds the table. Throws DomainError unless 0 < E1 < E and P is valid.
BilliardTable build_table(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1,
                          const QuadratureSpec& q = {});

/// kbar = min{k : V1(x_k) >= E1} (else K), kunder = max{k : V2(y_k) >= E - E1} (else 1).
std::pair<int, int> step_indices(const StaircaseData& s, const Potential& V1, const Potential& V2, double E, double E1);

/// 1 + number of steps k < K with V1(x_k) < E1 < E - V2(y_{k+1}), summed over quadrants.
int genus(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double E1);

/// Largest genus the polygon can reach: sum of step counts minus 3.
int g_max(const StarPolygon& P);

struct Singularity {
    Quadrant quadrant;
    int step;            ///< polygon step k: the corner sits at (x_k, y_{k+1})
    double psi1, psi2;   ///< unsigned corner coordinates in the quadrant
    int multiplicity = 2;
    double angle = 6.0 * std::numbers::pi;
};

struct SingularityData {
    std::vector<Singularity> singularities;
    int genus = 1;
    int multiplicity_sum = 0;  ///< equals 2 genus - 2
};

/// One multiplicity-2 singularity per concave corner of the table.
SingularityData singularity_data(const BilliardTable& table);

}  // namespace hisim
