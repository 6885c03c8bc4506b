#include "hisim/action_angle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hisim/errors.hpp"
#include "hisim/quadrature.hpp"

namespace hisim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Split point of the integration range in units of u = V(s)/E. Below it the integrand is
// regular in s; above it the substitution u = V(s)/E isolates the (1 - u)^(-1/2) factor.
constexpr double kUSplit = 0.5;

void check_energy(double E) {
    if (!(E > 0.0) || !std::isfinite(E)) throw DomainError("energy must be positive and finite");
}

// Returns true when x is at (or within rounding above) the turning point.
bool at_turning_point(const Potential& p, double x, double E) {
    const double v = p.value(x);
    if (v > E * (1.0 + 1e-12)) throw DomainError("psi: point lies beyond the turning point (V(x) > E)");
    return v >= E;
}

// int_0^x (E - V(s))^(-1/2) phi(s) ds with n nodes per piece; `full` integrates to x_max.
template <class Phi>
double singular_integral(const Potential& p, double E, double x, bool full, Phi&& phi, int n) {
    const double s_star = x_max(p, kUSplit * E);
    const double a_end = full ? s_star : std::min(x, s_star);
    double total = integrate_legendre([&](double s) { return phi(s) / std::sqrt(E - p.value(s)); }, 0.0, a_end, n);
    if (!full && x <= s_star) return total;

    const double sqrtE = std::sqrt(E);
    auto G = [&](double u) {
        const double s = x_max(p, E * u);
        return sqrtE * phi(s) / p.d1(s);
    };
    if (full) {
        // u = a + (1 - a)(1 + t)/2 maps the Jacobi weight (1 - t)^(-1/2) onto (1 - u)^(-1/2).
        const GaussRule& r = gauss_jacobi_inv_sqrt(n);
        const double a = kUSplit;
        double s = 0.0;
        for (Eigen::Index i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * G(a + (1.0 - a) * 0.5 * (1.0 + r.nodes[i]));
        total += std::sqrt(0.5 * (1.0 - a)) * s;
    } else {
        // w = sqrt(1 - u) turns the near-singular factor into a smooth integrand.
        const double wb = std::sqrt(std::max(0.0, (E - p.value(x)) / E));
        const double wa = std::sqrt(1.0 - kUSplit);
        total += 2.0 * integrate_legendre([&](double w) { return G(1.0 - w * w); }, wb, wa, n);
    }
    return total;
}

template <class Eval>
QuadratureResult refine(const QuadratureSpec& q, Eval&& eval_n) {
    validate(q);
    int n = q.nodes;
    double prev = eval_n(n);
    double err = std::numeric_limits<double>::infinity();
    while (2 * n <= q.max_nodes) {
        const double cur = eval_n(2 * n);
        err = std::fabs(cur - prev);
        n *= 2;
        prev = cur;
        if (err <= q.tol * std::max(1.0, std::fabs(cur))) break;
    }
    return {prev, err, n};
}

}  // namespace

void validate(const QuadratureSpec& q) {
    if (q.nodes < 16) throw DomainError("quadrature spec: nodes must be >= 16");
    if (!(q.tol >= 1e-14)) throw DomainError("quadrature spec: tol must be >= 1e-14");
    if (q.max_nodes < q.nodes) throw DomainError("quadrature spec: max_nodes must be >= nodes");
}

QuadratureResult psi_quadrature(const Potential& p, double x, double E, const QuadratureSpec& q) {
    check_energy(E);
    if (!(x >= 0.0)) throw DomainError("psi: x must be nonnegative");
    if (x == 0.0) return {0.0, 0.0, 0};
    const bool full = at_turning_point(p, x, E);
    auto r = refine(q, [&](int n) { return singular_integral(p, E, x, full, [](double) { return 1.0; }, n); });
    r.value /= kSqrt2;
    r.error /= kSqrt2;
    return r;
}

QuadratureResult quarter_period_quadrature(const Potential& p, double E, const QuadratureSpec& q) {
    check_energy(E);
    auto r = refine(q, [&](int n) { return singular_integral(p, E, 0.0, true, [](double) { return 1.0; }, n); });
    r.value /= kSqrt2;
    r.error /= kSqrt2;
    return r;
}

QuadratureResult dpsi_dE_quadrature(const Potential& p, double x, double E, const QuadratureSpec& q) {
    check_energy(E);
    if (!(x >= 0.0)) throw DomainError("dpsi_dE: x must be nonnegative");
    if (!(p.value(x) < E)) throw DomainError("dpsi_dE: requires V(x) < E");
    if (x == 0.0) return {0.0, 0.0, 0};

    const double s_star = x_max(p, kUSplit * E);
    auto eval = [&](int n) {
        const double a_end = std::min(x, s_star);
        double total = integrate_legendre(
            [&](double s) {
                const double d = E - p.value(s);
                return 1.0 / (d * std::sqrt(d));
            },
            0.0, a_end, n);
        if (x > s_star) {
            // u = V(s)/E, w = sqrt(1 - u), w = wb exp(tau): the (1-u)^(-3/2) growth becomes e^(-tau).
            const double wb = std::sqrt((E - p.value(x)) / E);
            const double wa = std::sqrt(1.0 - kUSplit);
            const double L = std::log(wa / wb);
            total += 2.0 / std::sqrt(E) *
                     integrate_legendre(
                         [&](double tau) {
                             const double w = wb * std::exp(tau);
                             return 1.0 / (p.d1(x_max(p, E * (1.0 - w * w))) * w);
                         },
                         0.0, L, n);
        }
        return total;
    };
    auto r = refine(q, eval);
    const double scale = -1.0 / (2.0 * kSqrt2);
    return {scale * r.value, std::fabs(scale) * r.error, r.nodes};
}

QuadratureResult dT_dE_quadrature(const Potential& p, double E, const QuadratureSpec& q) {
    check_energy(E);
    auto phi = [&](double s) { return 0.5 - p.curvature_ratio(s); };
    auto r = refine(q, [&](int n) { return singular_integral(p, E, 0.0, true, phi, n); });
    const double scale = 4.0 / (E * kSqrt2);
    return {scale * r.value, scale * r.error, r.nodes};
}

double psi(const Potential& p, double x, double E, const QuadratureSpec& q) {
    if (!p.is_quadratic()) return psi_quadrature(p, x, E, q).value;
    check_energy(E);
    if (!(x >= 0.0)) throw DomainError("psi: x must be nonnegative");
    at_turning_point(p, x, E);
    const double s = std::min(1.0, p.omega() * x / std::sqrt(2.0 * E));
    return std::asin(s) / p.omega();
}

double quarter_period(const Potential& p, double E, const QuadratureSpec& q) {
    if (!p.is_quadratic()) return quarter_period_quadrature(p, E, q).value;
    check_energy(E);
    return std::numbers::pi / (2.0 * p.omega());
}

double dpsi_dE(const Potential& p, double x, double E, const QuadratureSpec& q) {
    if (!p.is_quadratic()) return dpsi_dE_quadrature(p, x, E, q).value;
    check_energy(E);
    if (!(x >= 0.0)) throw DomainError("dpsi_dE: x must be nonnegative");
    const double w2x2 = p.omega() * p.omega() * x * x;
    if (!(w2x2 < 2.0 * E)) throw DomainError("dpsi_dE: requires V(x) < E");
    return -x / (2.0 * E * std::sqrt(2.0 * E - w2x2));
}

double dT_dE(const Potential& p, double E, const QuadratureSpec& q) {
    if (!p.is_quadratic()) return dT_dE_quadrature(p, E, q).value;
    check_energy(E);
    return 0.0;
}

PsiMap::PsiMap(const Potential& p, double E, const QuadratureSpec& q) : p_(p), E_(E), q_(q) {
    check_energy(E);
    require_admissible(p);
    w_ = quarter_period(p, E, q);
    xmax_ = hisim::x_max(p, E);
}

double PsiMap::operator()(double x) const {
    const double a = std::min(std::fabs(x), xmax_);
    if (std::fabs(x) > xmax_ * (1.0 + 1e-12)) throw DomainError("PsiMap: point beyond the turning point");
    const double v = a >= xmax_ ? w_ : psi(p_, a, E_, q_);
    return x < 0.0 ? -v : v;
}

double PsiMap::inverse(double s) const {
    const double t = std::min(std::fabs(s), w_);
    const double sgn = s < 0.0 ? -1.0 : 1.0;
    if (p_.is_quadratic()) return sgn * xmax_ * std::sin(p_.omega() * t);
    if (t >= w_) return sgn * xmax_;
    if (t == 0.0) return 0.0;

    // Safeguarded Newton on psi(x) = t; d psi/dx = 1/sqrt(2 (E - V)).
    double lo = 0.0, hi = xmax_;
    double x = xmax_ * std::sin(0.5 * std::numbers::pi * t / w_);
    for (int it = 0; it < 100 && hi - lo > 1e-15 * xmax_; ++it) {
        const double f = psi(p_, x, E_, q_) - t;
        if (f == 0.0) return sgn * x;
        (f < 0.0 ? lo : hi) = x;
        const double slope = 1.0 / std::sqrt(2.0 * std::max(E_ - p_.value(x), 1e-300));
        double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-16 * xmax_) {
            x = next;
            break;
        }
        x = next;
    }
    return sgn * x;
}

double PsiMap::from_state(double x, double px) const {
    if (p_.is_quadratic()) return std::atan2(p_.omega() * x, std::fabs(px)) / p_.omega();
    return (*this)(x);
}

double PsiMap::speed_at(double s) const {
    const double t = std::min(std::fabs(s), w_);
    if (p_.is_quadratic()) return std::sqrt(2.0 * E_) * std::cos(p_.omega() * t);
    return std::sqrt(2.0 * std::max(0.0, E_ - p_.value(inverse(t))));
}

}  // namespace hisim
