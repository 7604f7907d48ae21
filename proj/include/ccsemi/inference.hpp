#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ccsemi/types.hpp"

namespace ccsemi {

/// Negative Hessian of l(theta, p) divided by N, in (theta, p_1..p_N)
/// coordinates, with the p-p block kept as diag(d_pp) + U core U'.
///
/// The complement 1 - c is written as sum_i (1 - phi_i) p_i, which agrees
/// with 1 - sum_i phi_i p_i on the simplex and makes the p-p block exactly
/// rank-2 plus diagonal. Both forms give the same matrix once the constraint
/// sum p = 1 is eliminated.
struct InformationBlocks {
    Eigen::MatrixXd a_tt;        ///< (d+1) x (d+1)
    Eigen::MatrixXd a_tp;        ///< (d+1) x N
    Eigen::VectorXd d_pp;        ///< N, entries 1 / (N p_i^2)
    Eigen::MatrixXd u_low_rank;  ///< N x 2, columns phi and 1 - phi
    Eigen::Matrix2d core;        ///< -diag(n1 / c^2, n0 / (1 - c)^2) / N

    std::size_t atoms() const noexcept { return static_cast<std::size_t>(d_pp.size()); }
    std::size_t params() const noexcept { return static_cast<std::size_t>(a_tt.rows()); }
};

/// Throws ArgumentError when some p_i <= 0.
InformationBlocks negative_hessian(const Theta& theta, const JumpWeights& p,
                                   const SemiSupervisedDataset& data);

/// The blocks reassembled as one dense (d+1+N) square matrix.
Eigen::MatrixXd dense_full(const InformationBlocks& blocks);

/// Covariance estimate of theta_hat. The constraint is removed by writing
/// p_N = 1 - sum_{i<N} p_i; the theta block of the inverse comes from a Schur
/// complement whose p-block inverse uses the diagonal-plus-rank-3 structure,
/// so memory stays O(N d). Throws InferenceError when the reduced
/// information is not positive definite (smallest eigenvalue < 1e-10).
Eigen::MatrixXd theta_covariance(const InformationBlocks& blocks, std::size_t total_count);

/// (v, g)' I^-1 (v, g) for the functional with theta-gradient v and
/// p-gradient g. Adding a constant to every g_i does not change the value,
/// since the constraint removes that direction.
double functional_variance(const InformationBlocks& blocks, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& g);

/// Standard normal quantile.
double normal_quantile(double prob);

/// Per-parameter (lower, upper) at the given two-sided level, in the order
/// alpha, beta_1, ..., beta_d. Throws ArgumentError for level outside (0, 1)
/// or a fit without covariance.
std::vector<std::pair<double, double>> wald_ci(const FitResult& fit, double level);

/// Plug-in case proportion sum_i phi(x_i; theta) p_i.
double case_proportion(const Theta& theta, const JumpWeights& p, const CovariateMatrix& xs);

}  // namespace ccsemi
