#pragma once

#include "hisim/potential.hpp"

namespace hisim {

/// Controls the adaptive quadrature: start with `nodes` points, double until two
/// successive estimates differ by less than tol * max(1, |value|), stop at `max_nodes`.
struct QuadratureSpec {
    int nodes = 64;
    double tol = 1e-13;
    int max_nodes = 1024;
};

/// Throws DomainError unless nodes >= 16, tol >= 1e-14 and max_nodes >= nodes.
void validate(const QuadratureSpec& q);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  ///< |difference| between the last two refinements
    int nodes = 0;       ///< node count of the returned estimate
};

/// psi(x, E) = int_0^x ds / sqrt(2 (E - V(s))), the time to travel from 0 to x at energy E.
/// Closed form for quadratic potentials, quadrature otherwise. Requires 0 <= x, V(x) <= E.
double psi(const Potential& p, double x, double E, const QuadratureSpec& q = {});

/// Quarter of the oscillation period at energy E, i.e. psi(x_max(E), E).
double quarter_period(const Potential& p, double E, const QuadratureSpec& q = {});

/// d psi / dE at fixed x; requires V(x) < E. Always negative for x > 0.
double dpsi_dE(const Potential& p, double x, double E, const QuadratureSpec& q = {});

/// dT/dE for the full period T = 4 quarter_period.
double dT_dE(const Potential& p, double E, const QuadratureSpec& q = {});

/// Quadrature-only variants (never use the quadratic closed forms).
QuadratureResult psi_quadrature(const Potential& p, double x, double E, const QuadratureSpec& q = {});
QuadratureResult quarter_period_quadrature(const Potential& p, double E, const QuadratureSpec& q = {});
QuadratureResult dpsi_dE_quadrature(const Potential& p, double x, double E, const QuadratureSpec& q = {});
QuadratureResult dT_dE_quadrature(const Potential& p, double E, const QuadratureSpec& q = {});

/// Signed psi and its inverse for one degree of freedom at fixed energy E.
/// psi(-x) = -psi(x); the map is a monotone bijection [-x_max, x_max] -> [-w, w].
class PsiMap {
public:
    PsiMap(const Potential& p, double E, const QuadratureSpec& q = {});

    double operator()(double x) const;
    double inverse(double psi) const;

    /// Phase-angle form of psi from a state (x, p) on the energy level; well conditioned
    /// near the turning points. Returns a value in [-w, w].
    double from_state(double x, double px) const;

    /// |p| at the configuration point with signed psi coordinate.
    double speed_at(double psi) const;

    const Potential& potential() const { return p_; }
    double energy() const { return E_; }
    double quarter() const { return w_; }
    double x_max() const { return xmax_; }

private:
    Potential p_;
    double E_;
    QuadratureSpec q_;
    double w_;
    double xmax_;
};

}  // namespace hisim
