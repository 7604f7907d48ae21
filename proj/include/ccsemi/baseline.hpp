#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ccsemi/types.hpp"

namespace ccsemi {

struct ProspectiveFit {
    Theta theta;
    /// Inverse observed information of the Bernoulli log-likelihood.
    Eigen::MatrixXd cov;
    int iterations = 0;
};

struct ProspectiveOptions {
    double grad_tol = 1e-10;
    int max_iterations = 200;
    double divergence_bound = 50.0;
};

/// Ordinary logistic MLE on labeled rows, ignoring how they were sampled.
/// Throws DataError without both classes and DivergenceError when the
/// iterate norm exceeds the bound (perfect or quasi-perfect separation).
ProspectiveFit fit_prospective(const std::vector<LabeledObservation>& labeled,
                               const ProspectiveOptions& opts = {});

/// Same fit on the first y.size() rows of xs.
ProspectiveFit fit_prospective(const CovariateMatrix& xs, std::span<const double> y,
                               const ProspectiveOptions& opts = {});

/// log(n1 / n0) - logit(p_true): the limit of the prospective intercept
/// minus the population intercept under case-control sampling.
double cc_intercept_offset(std::size_t n1, std::size_t n0, double p_true);

}  // namespace ccsemi
