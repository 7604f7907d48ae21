#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ccsemi/types.hpp"

namespace ccsemi {

/// Logistic probability of a case at x; stable for |alpha + beta'x| up to ~700.
double phi(std::span<const double> x, const Theta& theta);

/// Linear predictor t, phi(t) and 1 - phi(t) for every row of xs.
struct LinkValues {
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<double> comp;
};

LinkValues evaluate_link(const Theta& theta, const CovariateMatrix& xs);

/// c = sum_i phi_i p_i and 1 - c. The complement is formed as
/// sum_i (1 - phi_i) p_i + (1 - sum_i p_i), which avoids cancellation when c
/// is close to 1 and equals 1 - c exactly in real arithmetic.
struct MixtureTerms {
    double c = 0.0;
    double one_minus_c = 0.0;
};

MixtureTerms mixture_terms(const LinkValues& link, const JumpWeights& p);

double mixture_mean(const Theta& theta, const JumpWeights& p, const CovariateMatrix& xs);

/// Full discretized log-likelihood l(theta, p). Returns -inf when some p_i <= 0
/// or the mixture mean leaves (0, 1).
double log_likelihood(const Theta& theta, const JumpWeights& p, const SemiSupervisedDataset& data);

/// The part of l that depends on theta for fixed p:
/// sum_lab [y log phi + (1 - y) log(1 - phi)] - n1 log c - n0 log(1 - c).
double theta_objective(const Theta& theta, const JumpWeights& p, const SemiSupervisedDataset& data);

Eigen::VectorXd grad_theta_objective(const Theta& theta, const JumpWeights& p,
                                     const SemiSupervisedDataset& data);

struct ObjectiveDerivatives {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/// Value, gradient and Hessian of theta_objective in one pass.
ObjectiveDerivatives theta_objective_derivatives(const Theta& theta, const JumpWeights& p,
                                                 const SemiSupervisedDataset& data);

}  // namespace ccsemi
