#pragma once

#include <string>
#include <vector>

namespace hisim {

enum class PotentialKind { Quadratic, EvenPolynomial, ExpGlued };

/// Even, confining one-degree-of-freedom potential V with V(0) = 0.
///
/// Three closed classes are supported:
///  - Quadratic:      V(x) = omega^2 x^2 / 2
///  - EvenPolynomial: V(x) = c_0 x^2 + c_1 x^4 + c_2 x^6 + ...
///  - ExpGlued:       V(x) = |x|^m exp(-1/|x|)
///
/// Even polynomials with negative coefficients can be constructed (they are useful for
/// convexity experiments) but `admissible()` reports whether V' > 0 holds on a sampled
/// grid and simulation entry points reject inadmissible potentials.
class Potential {
public:
    static Potential quadratic(double omega);
    static Potential even_polynomial(std::vector<double> coeffs);
    static Potential exp_glued(int m);

    PotentialKind kind() const { return kind_; }
    bool is_quadratic() const { return kind_ == PotentialKind::Quadratic; }
    double omega() const { return omega_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    int m() const { return m_; }

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    double operator()(double x) const { return value(x); }

    /// V V'' / V'^2, evaluated in a form that stays finite as x -> 0.
    double curvature_ratio(double x) const;

    /// V' > 0 on a sampled grid of (0, 10] and V unbounded.
    bool admissible() const { return admissible_; }

    std::string describe() const;

private:
    Potential() = default;
    void finish();

    PotentialKind kind_ = PotentialKind::Quadratic;
    double omega_ = 1.0;
    std::vector<double> coeffs_;
    int m_ = 0;
    bool admissible_ = false;
};

inline double eval(const Potential& p, double x) { return p.value(x); }

/// Positive root of V(x) = E. Throws DomainError for E <= 0.
double x_max(const Potential& p, double E);

/// Throws DomainError when the potential fails the sampled monotonicity check.
void require_admissible(const Potential& p);

struct SampleGrid {
    double x_hi = 2.0;
    int points = 1000;
};

struct SquareConvexity {
    bool satisfies_v = false;   ///< W = V V'' - V'^2/2 >= -tol on the grid
    bool satisfies_vi = false;  ///< additionally W > tol on at least 1% of the grid
};

/// Sampled test of whether sqrt(V) is convex (W >= 0) and strictly so somewhere.
SquareConvexity check_square_convex(const Potential& p, const SampleGrid& grid = {});

}  // namespace hisim
