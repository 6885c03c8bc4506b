#include "hisim/potential.hpp"

#include <cmath>
#include <sstream>

#include "hisim/errors.hpp"

namespace hisim {

namespace {

// Below this |x| the factor exp(-1/|x|) underflows in double precision.
constexpr double kExpUnderflow = 1.0 / 746.0;

// Horner evaluation of sum_j a_j t^j.
double horner(const std::vector<double>& a, double t) {
    double s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * t + *it;
    return s;
}

}  // namespace

Potential Potential::quadratic(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("quadratic potential needs omega > 0");
    Potential p;
    p.kind_ = PotentialKind::Quadratic;
    p.omega_ = omega;
    p.finish();
    return p;
}

Potential Potential::even_polynomial(std::vector<double> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.empty()) throw DomainError("even polynomial needs at least one nonzero coefficient");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw DomainError("even polynomial coefficient is not finite");
    Potential p;
    p.kind_ = PotentialKind::EvenPolynomial;
    p.coeffs_ = std::move(coeffs);
    p.finish();
    return p;
}

Potential Potential::exp_glued(int m) {
    if (m < 1) throw DomainError("exp_glued potential needs m >= 1");
    Potential p;
    p.kind_ = PotentialKind::ExpGlued;
    p.m_ = m;
    p.finish();
    return p;
}

void Potential::finish() {
    admissible_ = true;
    if (kind_ == PotentialKind::EvenPolynomial) {
        if (coeffs_.back() <= 0.0) admissible_ = false;
        for (int i = 1; i <= 1000 && admissible_; ++i) {
            const double x = 10.0 * i / 1000.0;
            if (!(d1(x) > 0.0)) admissible_ = false;
        }
    }
}

double Potential::value(double x) const {
    const double a = std::fabs(x);
    switch (kind_) {
        case PotentialKind::Quadratic:
            return 0.5 * omega_ * omega_ * a * a;
        case PotentialKind::EvenPolynomial:
            return a * a * horner(coeffs_, a * a);
        case PotentialKind::ExpGlued:
            if (a < kExpUnderflow) return 0.0;
            return std::pow(a, m_) * std::exp(-1.0 / a);
    }
    return 0.0;
}

double Potential::d1(double x) const {
    const double a = std::fabs(x);
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    switch (kind_) {
        case PotentialKind::Quadratic:
            return omega_ * omega_ * x;
        case PotentialKind::EvenPolynomial: {
            double s = 0.0;
            for (std::size_t j = coeffs_.size(); j-- > 0;) s = s * a * a + 2.0 * double(j + 1) * coeffs_[j];
            return x * s;
        }
        case PotentialKind::ExpGlued:
            if (a < kExpUnderflow) return 0.0;
            return sgn * std::pow(a, m_ - 2) * (m_ * a + 1.0) * std::exp(-1.0 / a);
    }
    return 0.0;
}

double Potential::d2(double x) const {
    const double a = std::fabs(x);
    switch (kind_) {
        case PotentialKind::Quadratic:
            return omega_ * omega_;
        case PotentialKind::EvenPolynomial: {
            double s = 0.0;
            for (std::size_t j = coeffs_.size(); j-- > 0;) {
                const double k = double(j + 1);
                s = s * a * a + 2.0 * k * (2.0 * k - 1.0) * coeffs_[j];
            }
            return s;
        }
        case PotentialKind::ExpGlued: {
            if (a < kExpUnderflow) return 0.0;
            const double m = m_;
            return std::pow(a, m_ - 4) * (m * (m - 1.0) * a * a + (2.0 * m - 2.0) * a + 1.0) * std::exp(-1.0 / a);
        }
    }
    return 0.0;
}

double Potential::curvature_ratio(double x) const {
    const double a = std::fabs(x);
    switch (kind_) {
        case PotentialKind::Quadratic:
            return 0.5;
        case PotentialKind::EvenPolynomial: {
            // V/x^2, V'/x and V'' are all polynomials in x^2 with nonzero constant term
            // whenever c_0 != 0; the ratio is then regular at 0.
            const double t = a * a;
            double v = 0.0, w = 0.0;
            for (std::size_t j = coeffs_.size(); j-- > 0;) {
                v = v * t + coeffs_[j];
                w = w * t + 2.0 * double(j + 1) * coeffs_[j];
            }
            return v * d2(a) / (w * w);
        }
        case PotentialKind::ExpGlued: {
            const double m = m_;
            const double den = m * a + 1.0;
            return (m * (m - 1.0) * a * a + (2.0 * m - 2.0) * a + 1.0) / (den * den);
        }
    }
    return 0.0;
}

std::string Potential::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case PotentialKind::Quadratic:
            os << "quadratic(omega=" << omega_ << ")";
            break;
        case PotentialKind::EvenPolynomial:
            os << "even_poly(";
            for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
            os << ")";
            break;
        case PotentialKind::ExpGlued:
            os << "exp_glued(m=" << m_ << ")";
            break;
    }
    return os.str();
}

double x_max(const Potential& p, double E) {
    if (!(E > 0.0) || !std::isfinite(E)) throw DomainError("x_max needs E > 0");
    if (p.is_quadratic()) return std::sqrt(2.0 * E) / p.omega();

    double lo = 0.0, hi = 1.0;
    while (p.value(hi) < E) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw DomainError("x_max: energy level not reached");
    }
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (p.value(mid) < E ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double d = p.d1(x);
        if (!(d > 0.0)) break;
        const double next = x - (p.value(x) - E) / d;
        if (!(next >= lo && next <= hi)) break;
        x = next;
    }
    return x;
}

void require_admissible(const Potential& p) {
    if (!p.admissible())
        throw DomainError("potential " + p.describe() + " is not monotone on (0, inf); rejected for simulation");
}

SquareConvexity check_square_convex(const Potential& p, const SampleGrid& grid) {
    if (grid.points < 1 || !(grid.x_hi > 0.0)) throw DomainError("check_square_convex: empty grid");
    SquareConvexity out{true, false};
    int strict = 0;
    for (int i = 1; i <= grid.points; ++i) {
        const double x = grid.x_hi * i / grid.points;
        const double v = p.value(x), v1 = p.d1(x), v2 = p.d2(x);
        const double w = v * v2 - 0.5 * v1 * v1;
        const double tol = 1e-10 * (1.0 + std::fabs(v * v2) + v1 * v1);
        if (w < -tol) out.satisfies_v = false;
        if (w > tol) ++strict;
    }
    out.satisfies_vi = out.satisfies_v && strict * 100 >= grid.points;
    return out;
}

}  // namespace hisim
