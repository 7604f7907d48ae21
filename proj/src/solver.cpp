#include "ccsemi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ccsemi/baseline.hpp"
#include "ccsemi/error.hpp"
#include "ccsemi/inference.hpp"
#include "ccsemi/kernels.hpp"
#include "ccsemi/model.hpp"

namespace ccsemi {
namespace {

/// Newton direction for maximization with the Hessian replaced by
/// -V |Lambda| V' (eigenvalues floored), so it is always an ascent direction.
Eigen::VectorXd ascent_direction(const ObjectiveDerivatives& d) {
    const Eigen::MatrixXd neg = -0.5 * (d.hessian + d.hessian.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg);
    const Eigen::VectorXd lam = es.eigenvalues();
    const double floor = std::max(1e-8 * lam.cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd inv = lam.cwiseAbs().cwiseMax(floor).cwiseInverse();
    return es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().transpose() * d.gradient));
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

}  // namespace

Theta theta_step(const SemiSupervisedDataset& data, const JumpWeights& p, const Theta& theta_start,
                 const SolverOptions& opts) {
    if (!theta_start.is_finite()) throw ArgumentError("theta start is not finite");
    Eigen::VectorXd x = theta_start.to_vector();
    const double start_value = theta_objective(theta_start, p, data);
    if (!std::isfinite(start_value)) throw ArgumentError("objective is not finite at theta start");

    ObjectiveDerivatives d = theta_objective_derivatives(theta_start, p, data);
    for (int it = 0; it < opts.inner_max_iterations; ++it) {
        if (d.gradient.norm() <= opts.inner_grad_tol) break;
        const Eigen::VectorXd step = ascent_direction(d);
        const double slope = step.dot(d.gradient);
        double scale = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, scale *= 0.5) {
            const Eigen::VectorXd trial = x + scale * step;
            const double v = theta_objective(Theta::from_vector(trial), p, data);
            if (std::isfinite(v) &&
                (v >= d.value + 1e-4 * scale * slope || (scale == 1.0 && v >= d.value))) {
                if (trial.norm() > opts.divergence_bound)
                    throw DivergenceError("theta diverged (separated classes?)", trial.norm());
                const double c = mixture_mean(Theta::from_vector(trial), p, data.covariates());
                if (!(c >= opts.boundary_tol && c <= 1.0 - opts.boundary_tol))
                    throw DivergenceError("case proportion reached " + std::to_string(c) +
                                              "; the maximum lies at infinite intercept",
                                          trial.norm());
                x = trial;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        d = theta_objective_derivatives(Theta::from_vector(x), p, data);
    }
    return Theta::from_vector(x);
}

JumpWeights p_step(const SemiSupervisedDataset& data, const Theta& theta, const JumpWeights& p,
                   bool renormalize) {
    const std::size_t total = data.total_count();
    if (p.size() != total) throw ArgumentError("jump weights do not match the data");
    const auto& k = kernels::active();
    const LinkValues link = evaluate_link(theta, data.covariates());
    const MixtureTerms m = mixture_terms(link, p);
    if (!(m.c > 0.0 && m.c < 1.0) || !(m.one_minus_c > 0.0))
        throw NumericalError("mixture mean " + std::to_string(m.c) + " is outside (0, 1)");

    std::vector<double> out(total);
    k.jump_update(link.phi.data(), link.comp.data(), total, static_cast<double>(data.n1()) / m.c,
                  static_cast<double>(data.n0()) / m.one_minus_c,
                  static_cast<double>(total - data.labeled_count()), out.data());
    if (renormalize) {
        const double s = k.sum(out.data(), total);
        for (double& v : out) v /= s;
    }
    return JumpWeights(std::move(out));
}

FitResult fit_mle(const SemiSupervisedDataset& data, const SolverOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    if (!(opts.boundary_tol >= 0.0 && opts.boundary_tol < 0.5)) throw ArgumentError("boundary_tol must lie in [0, 0.5)");
    if (opts.max_iterations < 1) throw ArgumentError("max_iterations must be at least 1");
    if (!(opts.inner_grad_tol > 0.0)) throw ArgumentError("inner_grad_tol must be positive");

    const std::size_t total = data.total_count();
    FitResult fit;

    JumpWeights p = opts.p_init ? *opts.p_init : JumpWeights::uniform(total);
    if (p.size() != total) throw ArgumentError("p_init does not match the data");
    if (!p.all_positive()) throw ArgumentError("p_init must be strictly positive");

    Theta theta;
    if (opts.theta_init) {
        theta = *opts.theta_init;
        if (theta.dim() != data.dim()) throw ArgumentError("theta_init does not match the data");
    } else {
        try {
            theta = fit_prospective(data.covariates(), data.labels(),
                                    {.divergence_bound = opts.divergence_bound})
                        .theta;
        } catch (const DivergenceError&) {
            theta = Theta::zeros(data.dim());
            fit.warnings.emplace_back("prospective start diverged; started from theta = 0");
        }
    }

    fit.loglik_trace.push_back(log_likelihood(theta, p, data));
    for (int j = 1; j <= opts.max_iterations; ++j) {
        Theta next_theta = theta_step(data, p, theta, opts);
        JumpWeights next_p = p_step(data, next_theta, p, opts.renormalize_p);
        fit.loglik_trace.push_back(log_likelihood(next_theta, next_p, data));

        const double dtheta = (next_theta.to_vector() - theta.to_vector()).norm();
        const double dp = euclidean_distance(next_p.values(), p.values());
        theta = std::move(next_theta);
        p = std::move(next_p);
        fit.iterations = j;
        if (dtheta <= opts.epsilon && dp <= opts.epsilon) {
            fit.converged = true;
            break;
        }
    }

    fit.theta_hat = theta;
    fit.p_hat = p;
    fit.loglik = fit.loglik_trace.back();
    fit.case_proportion = mixture_mean(theta, p, data.covariates());

    if (!fit.converged)
        fit.warnings.push_back("no convergence within " + std::to_string(opts.max_iterations) +
                               " iterations");
    double beta_norm = 0.0;
    for (double b : theta.beta) beta_norm += b * b;
    if (std::sqrt(beta_norm) < 1e-3)
        fit.warnings.emplace_back("slope estimate is near zero; the intercept is not identifiable");
    if (data.unlabeled_count() == 0)
        fit.warnings.emplace_back("no unlabeled rows; the intercept is not identifiable");
    if (!(fit.case_proportion > 1e-12 && fit.case_proportion < 1.0 - 1e-12))
        fit.warnings.emplace_back("case proportion estimate is at the boundary of (0, 1)");

    if (opts.compute_covariance) {
        try {
            fit.theta_cov = theta_covariance(negative_hessian(theta, p, data), total);
        } catch (const InferenceError& e) {
            fit.warnings.push_back(std::string("no covariance: ") + e.what() +
                                   " (smallest eigenvalue " + std::to_string(e.smallest_eigenvalue()) +
                                   ")");
        } catch (const NumericalError& e) {
            fit.warnings.push_back(std::string("no covariance: ") + e.what());
        }
    }
    return fit;
}

}  // namespace ccsemi
