#include "ccsemi/baseline.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "ccsemi/error.hpp"
#include "ccsemi/kernels.hpp"
#include "detail/weighted.hpp"

namespace ccsemi {
namespace {

struct BernoulliState {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd neg_hessian;
};

double bernoulli_value(const Eigen::VectorXd& theta, const CovariateMatrix& xs,
                       std::span<const double> y, std::vector<double>& t) {
    const auto& k = kernels::active();
    const std::size_t n = y.size();
    k.affine(xs.data(), xs.rows(), xs.cols(), theta(0), theta.data() + 1, t.data());
    return -k.neg_bernoulli_loglik(t.data(), y.data(), n);
}

BernoulliState bernoulli_state(const Eigen::VectorXd& theta, const CovariateMatrix& xs,
                               std::span<const double> y, std::vector<double>& t) {
    const auto& k = kernels::active();
    const std::size_t n = y.size();
    BernoulliState s;
    s.value = bernoulli_value(theta, xs, y, t);
    std::vector<double> phi(n), comp(n), resid(n), w(n);
    k.logistic(t.data(), n, phi.data(), comp.data());
    for (std::size_t i = 0; i < n; ++i) {
        resid[i] = y[i] * comp[i] - (1.0 - y[i]) * phi[i];
        w[i] = phi[i] * comp[i];
    }
    s.gradient = detail::weighted_sum(k, resid, xs, n);
    s.neg_hessian = detail::weighted_gram(k, w, xs, n);
    return s;
}

}  // namespace

ProspectiveFit fit_prospective(const CovariateMatrix& xs, std::span<const double> y,
                               const ProspectiveOptions& opts) {
    const std::size_t n = y.size();
    if (n > xs.rows()) throw ArgumentError("more labels than covariate rows");
    std::size_t cases = 0;
    for (double v : y) {
        if (v != 0.0 && v != 1.0) throw ArgumentError("labels must be 0 or 1");
        cases += v == 1.0;
    }
    if (cases == 0 || cases == n) throw DataError("prospective fit needs both classes");

    // The affine kernel walks whole columns, so work on the labeled prefix only.
    const CovariateMatrix lab = n == xs.rows() ? xs : xs.slice_rows(0, n);
    const auto d = static_cast<Eigen::Index>(xs.cols() + 1);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    std::vector<double> t(n);

    ProspectiveFit fit;
    BernoulliState s = bernoulli_state(theta, lab, y, t);
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(s.neg_hessian);
        Eigen::VectorXd step = ldlt.solve(s.gradient);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(s.gradient) <= 0.0)
            step = s.gradient;
        // Under separation the gradient vanishes while Newton steps stay O(1),
        // so both must be small before stopping.
        if (s.gradient.norm() <= opts.grad_tol && step.norm() <= 1e-8 * (1.0 + theta.norm())) break;
        fit.iterations = it + 1;

        const double slope = step.dot(s.gradient);
        double scale = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, scale *= 0.5) {
            const Eigen::VectorXd trial = theta + scale * step;
            const double v = bernoulli_value(trial, lab, y, t);
            if (std::isfinite(v) &&
                (v >= s.value + 1e-4 * scale * slope || (scale == 1.0 && v >= s.value))) {
                if (trial.norm() > opts.divergence_bound)
                    throw DivergenceError("prospective fit diverged (separated classes?)",
                                          trial.norm());
                theta = trial;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        s = bernoulli_state(theta, lab, y, t);
    }

    fit.theta = Theta::from_vector(theta);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s.neg_hessian);
    fit.cov = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
    return fit;
}

ProspectiveFit fit_prospective(const std::vector<LabeledObservation>& labeled,
                               const ProspectiveOptions& opts) {
    if (labeled.empty()) throw DataError("labeled data are empty");
    const std::size_t dim = labeled.front().x.size();
    CovariateMatrix xs(labeled.size(), dim);
    std::vector<double> y(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (labeled[i].x.size() != dim)
            throw ArgumentError("labeled row " + std::to_string(i) + " has the wrong dimension");
        y[i] = static_cast<double>(labeled[i].y);
        for (std::size_t k = 0; k < dim; ++k) xs(i, k) = labeled[i].x[k];
    }
    return fit_prospective(xs, y, opts);
}

double cc_intercept_offset(std::size_t n1, std::size_t n0, double p_true) {
    if (n1 == 0 || n0 == 0) throw ArgumentError("class sizes must be positive");
    if (!(p_true > 0.0 && p_true < 1.0)) throw ArgumentError("p_true must lie in (0, 1)");
    return std::log(static_cast<double>(n1) / static_cast<double>(n0)) -
           std::log(p_true / (1.0 - p_true));
}

}  // namespace ccsemi
