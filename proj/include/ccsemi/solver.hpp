#pragma once

#include <optional>

#include "ccsemi/types.hpp"

namespace ccsemi {

struct SolverOptions {
    /// Outer stopping rule: both ||theta step|| and ||p step|| at most epsilon.
    double epsilon = 1e-6;
    int max_iterations = 500;
    /// Defaults to the prospective fit on the labeled rows.
    std::optional<Theta> theta_init;
    /// Defaults to uniform 1/N.
    std::optional<JumpWeights> p_init;
    /// Gradient norm at which the inner theta maximization stops.
    double inner_grad_tol = 1e-8;
    int inner_max_iterations = 100;
    /// Divide each jump-weight update by its sum. Off gives the raw
    /// fixed-point map, whose iterates drift off the simplex mid-run.
    bool renormalize_p = true;
    /// ||theta|| beyond this raises DivergenceError.
    double divergence_bound = 50.0;
    /// A theta step leaving c in [boundary_tol, 1 - boundary_tol] raises
    /// DivergenceError. The supremum then lies at infinite |alpha|, where the
    /// likelihood tends to a finite limit that 1 - c cannot resolve.
    double boundary_tol = 1e-6;
    /// Compute theta_cov at the end.
    bool compute_covariance = true;
};

/// Maximizes the theta part of the log-likelihood for fixed p by damped
/// Newton steps. The returned point never has a lower objective than
/// theta_start. Throws ArgumentError when the objective at theta_start is
/// not finite and DivergenceError past the divergence bound or when the
/// mixture mean c reaches the boundary tolerance.
Theta theta_step(const SemiSupervisedDataset& data, const JumpWeights& p, const Theta& theta_start,
                 const SolverOptions& opts = {});

/// p_i = 1 / (n1 phi_i / c + n0 (1 - phi_i) / (1 - c) + N - n) with
/// c = sum_i phi_i p_i, optionally divided by its sum afterwards. Throws
/// NumericalError when c is not inside (0, 1).
JumpWeights p_step(const SemiSupervisedDataset& data, const Theta& theta, const JumpWeights& p,
                   bool renormalize = false);

/// Alternates theta_step and p_step until both move by at most epsilon.
///
/// loglik_trace[0] is l at the starting point and entry j is
/// l(theta^(j), p^(j+1)) after iteration j. Non-convergence, a near-zero
/// slope vector, an empty unlabeled sample and covariance failures are
/// reported in `warnings`, not thrown.
FitResult fit_mle(const SemiSupervisedDataset& data, const SolverOptions& opts = {});

}  // namespace ccsemi
