#pragma once

#include <Eigen/Dense>

namespace hisim {

/// Nodes and weights of an n-point Gauss rule on [-1, 1].
struct GaussRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Gauss-Jacobi rule for the weight (1 - t)^alpha (1 + t)^beta on [-1, 1], built with
/// the Golub-Welsch eigenvalue method. alpha, beta > -1.
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// Cached Gauss-Legendre rule (alpha = beta = 0). Thread-safe.
const GaussRule& gauss_legendre(int n);

/// Cached Gauss-Jacobi rule for the weight (1 - t)^(-1/2). Thread-safe.
const GaussRule& gauss_jacobi_inv_sqrt(int n);

/// Integral of f over [a, b] with the n-point Gauss-Legendre rule.
template <class F>
double integrate_legendre(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

}  // namespace hisim
