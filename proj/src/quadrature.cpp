#include "ccsemi/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ccsemi/error.hpp"

namespace ccsemi {

GaussHermiteRule gauss_hermite(std::size_t order) {
    if (order == 0) throw ArgumentError("quadrature order must be positive");
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k)
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double mass = std::sqrt(std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = es.eigenvectors()(0, i);
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        rule.weights[static_cast<std::size_t>(i)] = mass * v * v;
    }
    return rule;
}

double true_case_proportion(const Theta& theta) {
    static const GaussHermiteRule rule = gauss_hermite(200);
    double norm2 = 0.0;
    for (double b : theta.beta) norm2 += b * b;
    return normal_expectation(rule, theta.alpha, std::sqrt(norm2), [](double t) {
        const double e = std::exp(-std::fabs(t));
        return t >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    });
}

}  // namespace ccsemi
