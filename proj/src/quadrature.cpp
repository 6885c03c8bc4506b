#include "hisim/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "hisim/errors.hpp"

namespace hisim {

GaussRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("gauss_jacobi: n must be positive");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: alpha, beta must exceed -1");

    const double ab = alpha + beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        sub[k - 1] = std::sqrt(num / (s * s * (s + 1.0) * (s - 1.0)));
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                                std::lgamma(ab + 2.0));

    GaussRule rule;
    if (n == 1) {
        rule.nodes = Eigen::ArrayXd::Constant(1, diag[0]);
        rule.weights = Eigen::ArrayXd::Constant(1, mu0);
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw DomainError("gauss_jacobi: eigen solve failed");
    rule.nodes = solver.eigenvalues().array();
    rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
    return rule;
}

namespace {

const GaussRule& cached(int n, double alpha, double beta) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, alpha}];
    if (!slot) slot = std::make_unique<GaussRule>(gauss_jacobi(n, alpha, beta));
    return *slot;
}

}  // namespace

const GaussRule& gauss_legendre(int n) { return cached(n, 0.0, 0.0); }

const GaussRule& gauss_jacobi_inv_sqrt(int n) { return cached(n, -0.5, 0.0); }

}  // namespace hisim
