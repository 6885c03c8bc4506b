#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "hisim/flow.hpp"
#include "hisim/geometry.hpp"
#include "hisim/intervals.hpp"
#include "hisim/potential.hpp"

namespace hisim {

/// Resonant quadratic pair V1 = n^2 c^2 x^2 / 2, V2 = m^2 c^2 y^2 / 2 with Omega = n / m.
struct ResonanceSpec {
    int m = 1;
    int n = 1;
    double c = 1.0;

    /// Throws DomainError unless m, n >= 1 are coprime and c > 0.
    static ResonanceSpec make(int m, int n, double c);

    double C() const { return 1.0 / (m * n * c); }
    double omega() const { return double(n) / m; }
    Potential V1() const { return Potential::quadratic(n * c); }
    Potential V2() const { return Potential::quadratic(m * c); }
    double quarter_T1() const;  ///< m C pi / 2
    double quarter_T2() const;  ///< n C pi / 2
    /// Length of every closed diagonal geodesic on the unfolded torus: 2 pi / c = n T1 = m T2.
    double geodesic_period() const;
    /// Circumference of the transverse circle of diagonal geodesics: 2 pi C.
    double transverse_length() const;
};

enum class Colour { Green, Red };
std::string_view colour_name(Colour c);

struct ColourPartition {
    std::array<Quadrant, 2> green;
    std::array<Quadrant, 2> red;
    Colour colour_of(Quadrant q) const;
};

/// Throws DomainError when gcd(m, n) != 1.
ColourPartition green_partition(int m, int n);

/// m arccos sqrt(V1(x_k)/E1) + n arccos sqrt(V2(y_{k+1})/(E - E1)) for one concave corner.
double corner_delta(const ResonanceSpec& spec, double v1_xk, double v2_yk1, double E, double E1);

/// Max corner contribution over the active concave corners of the quadrants of one colour;
/// 0 when the colour has none.
double delta_colour(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1, Colour colour);

struct USubinterval {
    double lo = 0.0;
    double hi = 0.0;
    bool plus = false;  ///< delta_green + delta_red > pi
};

/// Splits [lo, hi] by the sign of delta_green + delta_red - pi. Sign changes are detected on a
/// uniform grid and refined by bisection to `root_tol`.
std::vector<USubinterval> classify_U(const StarPolygon& P, const ResonanceSpec& spec, double E, double lo, double hi,
                                     int grid = 1000, double root_tol = 1e-10);

struct CylinderFractions {
    double red = 0.0;
    double green = 0.0;
    double periodic = 0.0;
};

/// Transverse measure of the two coloured cylinders and the periodic remainder.
/// Throws DomainError when delta_green + delta_red >= pi.
CylinderFractions cylinder_fractions(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1);

enum class Scenario { UE, CP, Coex, UEExtremal, Unknown };
std::string_view scenario_name(Scenario s);

/// Predicted dynamics on an E1 interval [lo, hi] (an interval of the energy partition or a
/// refinement of it). Pass `spec` for a resonant quadratic pair; without it the pair is treated
/// as non-resonant (irrational quadratic, or non-quadratic).
Scenario scenario(const StarPolygon& P, const Potential& V1, const Potential& V2, double E, double lo, double hi,
                  const std::optional<ResonanceSpec>& spec = std::nullopt);

/// Torus picture of a resonant table: every billiard state (psi, direction) lies on a closed
/// diagonal geodesic labelled by a transverse coordinate u in [0, 2 pi C).
class TorusChart {
public:
    TorusChart(const StarPolygon& P, const ResonanceSpec& spec, double E, double E1);

    double w() const { return w_; }
    double h() const { return h_; }
    /// Transverse coordinate of the geodesic through a state.
    double transverse(const PsiState& s) const;
    /// Transverse coordinate of the geodesic through the outer corner of quadrant q.
    double marked(Quadrant q) const;
    double delta(Colour c) const { return c == Colour::Green ? delta_green_ : delta_red_; }
    /// Component of a state: Green or Red cylinder, or nullopt for the periodic set.
    std::optional<Colour> component(const PsiState& s) const;
    /// Whether a point in psi coordinates with direction copy (s1, s2) lies in the support of
    /// the given colour component.
    bool in_support(Colour c, double psi1, double psi2, int s1, int s2) const;

private:
    double circ_dist(double a, double b) const;
    ResonanceSpec spec_;
    ColourPartition part_;
    double w_ = 0.0, h_ = 0.0;
    double delta_green_ = 0.0, delta_red_ = 0.0;
};

}  // namespace hisim
