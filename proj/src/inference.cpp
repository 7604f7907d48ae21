#include "ccsemi/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ccsemi/error.hpp"
#include "ccsemi/kernels.hpp"
#include "ccsemi/model.hpp"
#include "detail/weighted.hpp"

namespace ccsemi {
namespace {

constexpr double kMinEigenvalue = 1e-10;

/// Information in the reduced coordinates (theta, p_1..p_{N-1}):
///   [ A   B ]      P = diag(dinv)^-1 + W M W'
///   [ B'  P ]
/// with W = [1, U_i - U_N] and M = blockdiag(d_N, core).
struct Reduced {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;     // (d+1) x (N-1)
    Eigen::VectorXd dinv;  // N-1
    Eigen::MatrixXd w;     // (N-1) x 3
    Eigen::Matrix3d m;
    Eigen::Matrix3d g;     // M (I + W' D^-1 W M)^-1
    Eigen::Matrix3d k;     // W' D^-1 W
};

Reduced reduce(const InformationBlocks& blk) {
    const Eigen::Index n = static_cast<Eigen::Index>(blk.atoms());
    const Eigen::Index m = n - 1;
    Reduced r;
    r.a = blk.a_tt;
    r.b = blk.a_tp.leftCols(m).colwise() - blk.a_tp.col(n - 1);
    r.dinv = blk.d_pp.head(m).cwiseInverse();
    r.w.resize(m, 3);
    r.w.col(0).setOnes();
    r.w.col(1) = blk.u_low_rank.col(0).head(m).array() - blk.u_low_rank(n - 1, 0);
    r.w.col(2) = blk.u_low_rank.col(1).head(m).array() - blk.u_low_rank(n - 1, 1);
    r.m.setZero();
    r.m(0, 0) = blk.d_pp(n - 1);
    r.m.bottomRightCorner<2, 2>() = blk.core;
    r.k = r.w.transpose() * r.dinv.asDiagonal() * r.w;

    // P is positive definite iff I + K^1/2 M K^1/2 is.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ek(r.k);
    const Eigen::Matrix3d k_half =
        ek.eigenvectors() * ek.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        ek.eigenvectors().transpose();
    Eigen::Matrix3d scaled = Eigen::Matrix3d::Identity() + k_half * r.m * k_half;
    scaled = 0.5 * (scaled + scaled.transpose()).eval();
    const double pmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(scaled).eigenvalues()(0);
    if (!(pmin >= kMinEigenvalue))
        throw InferenceError("jump-weight block of the information is not positive definite", pmin);

    const Eigen::Matrix3d inner = Eigen::Matrix3d::Identity() + r.k * r.m;
    r.g = r.m * inner.partialPivLu().inverse();
    return r;
}

/// P^-1 R for a block of columns R.
Eigen::MatrixXd apply_pinv(const Reduced& r, const Eigen::MatrixXd& rhs) {
    const Eigen::MatrixXd dr = r.dinv.asDiagonal() * rhs;
    return dr - r.dinv.asDiagonal() * (r.w * (r.g * (r.w.transpose() * dr)));
}

struct Schur {
    Eigen::MatrixXd s;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

Schur schur(const Reduced& r) {
    const Eigen::MatrixXd bd = r.b * r.dinv.asDiagonal();
    const Eigen::MatrixXd bdw = bd * r.w;
    Eigen::MatrixXd s = r.a - bd * r.b.transpose() + bdw * r.g * bdw.transpose();
    s = 0.5 * (s + s.transpose()).eval();
    const double smin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues()(0);
    if (!(smin >= kMinEigenvalue))
        throw InferenceError("information for theta is singular; beta may be zero", smin);
    Schur out{s, Eigen::LDLT<Eigen::MatrixXd>(s)};
    return out;
}

}  // namespace

InformationBlocks negative_hessian(const Theta& theta, const JumpWeights& p,
                                   const SemiSupervisedDataset& data) {
    const std::size_t total = data.total_count();
    if (p.size() != total) throw ArgumentError("jump weights do not match the data");
    if (!p.all_positive()) throw ArgumentError("information needs every jump mass positive");

    const auto& k = kernels::active();
    const CovariateMatrix& xs = data.covariates();
    const std::size_t n = data.labeled_count();
    const LinkValues link = evaluate_link(theta, xs);
    const double* pv = p.values().data();
    const double c = k.dot(link.phi.data(), pv, total);
    const double omc = k.dot(link.comp.data(), pv, total);
    if (!(c > 0.0) || !(omc > 0.0)) throw NumericalError("mixture mean left (0, 1)");

    std::vector<double> w(total), wp(total), curv(total);
    for (std::size_t i = 0; i < total; ++i) {
        w[i] = link.phi[i] * link.comp[i];
        wp[i] = w[i] * pv[i];
        curv[i] = wp[i] * (link.comp[i] - link.phi[i]);
    }

    const double n1 = static_cast<double>(data.n1());
    const double n0 = static_cast<double>(data.n0());
    const double big_n = static_cast<double>(total);
    const double slope = n1 / c - n0 / omc;
    const double bend = n1 / (c * c) + n0 / (omc * omc);
    const Eigen::VectorXd g = detail::weighted_sum(k, wp, xs, total);
    const Eigen::MatrixXd hess = -detail::weighted_gram(k, w, xs, n) -
                                 slope * detail::weighted_gram(k, curv, xs, total) +
                                 bend * (g * g.transpose());

    InformationBlocks blk;
    const auto d = static_cast<Eigen::Index>(data.dim() + 1);
    const auto nn = static_cast<Eigen::Index>(total);
    blk.a_tt = -hess / big_n;
    blk.a_tt = 0.5 * (blk.a_tt + blk.a_tt.transpose()).eval();

    blk.a_tp.resize(d, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double wx = w[ui] * slope;
        const double gcoef = n1 * link.phi[ui] / (c * c) - n0 * link.comp[ui] / (omc * omc);
        blk.a_tp(0, i) = wx - gcoef * g(0);
        for (Eigen::Index j = 1; j < d; ++j)
            blk.a_tp(j, i) = wx * xs(ui, static_cast<std::size_t>(j - 1)) - gcoef * g(j);
    }
    blk.a_tp /= big_n;

    blk.d_pp.resize(nn);
    blk.u_low_rank.resize(nn, 2);
    for (Eigen::Index i = 0; i < nn; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        blk.d_pp(i) = 1.0 / (big_n * pv[ui] * pv[ui]);
        blk.u_low_rank(i, 0) = link.phi[ui];
        blk.u_low_rank(i, 1) = link.comp[ui];
    }
    blk.core << -n1 / (c * c) / big_n, 0.0, 0.0, -n0 / (omc * omc) / big_n;
    return blk;
}

Eigen::MatrixXd dense_full(const InformationBlocks& blk) {
    const Eigen::Index d = blk.a_tt.rows();
    const Eigen::Index n = blk.d_pp.size();
    Eigen::MatrixXd full(d + n, d + n);
    full.topLeftCorner(d, d) = blk.a_tt;
    full.topRightCorner(d, n) = blk.a_tp;
    full.bottomLeftCorner(n, d) = blk.a_tp.transpose();
    full.bottomRightCorner(n, n) = blk.u_low_rank * blk.core * blk.u_low_rank.transpose();
    full.bottomRightCorner(n, n).diagonal() += blk.d_pp;
    return full;
}

Eigen::MatrixXd theta_covariance(const InformationBlocks& blocks, std::size_t total_count) {
    if (total_count == 0 || total_count != blocks.atoms())
        throw ArgumentError("atom count does not match the information blocks");
    const Schur s = schur(reduce(blocks));
    const auto d = s.s.rows();
    Eigen::MatrixXd cov = s.ldlt.solve(Eigen::MatrixXd::Identity(d, d));
    cov = 0.5 * (cov + cov.transpose()).eval();
    return cov / static_cast<double>(total_count);
}

double functional_variance(const InformationBlocks& blocks, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& g) {
    const Eigen::Index n = static_cast<Eigen::Index>(blocks.atoms());
    if (v.size() != blocks.a_tt.rows() || g.size() != n)
        throw ArgumentError("functional gradient has the wrong dimensions");
    const Reduced r = reduce(blocks);
    const Schur s = schur(r);
    const Eigen::VectorXd h = g.head(n - 1).array() - g(n - 1);
    const Eigen::VectorXd ph = apply_pinv(r, h);
    const Eigen::VectorXd resid = v - r.b * ph;
    const double value = resid.dot(s.ldlt.solve(resid)) + h.dot(ph);
    return std::max(value, 0.0);
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        if (prob == 0.0) return -std::numeric_limits<double>::infinity();
        if (prob == 1.0) return std::numeric_limits<double>::infinity();
        throw ArgumentError("probability must lie in [0, 1]");
    }
    // Rational approximation (relative error ~1e-9) polished by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double low = 0.02425;
    double x;
    if (prob < low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - prob;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

std::vector<std::pair<double, double>> wald_ci(const FitResult& fit, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0, 1)");
    const auto se = fit.standard_errors();
    if (!se) throw ArgumentError("fit has no covariance estimate");
    const double z = normal_quantile(0.5 * (1.0 + level));
    const Eigen::VectorXd est = fit.theta_hat.to_vector();
    if (se->size() != est.size()) throw ArgumentError("covariance does not match theta");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(est.size()));
    for (Eigen::Index j = 0; j < est.size(); ++j)
        out.emplace_back(est(j) - z * (*se)(j), est(j) + z * (*se)(j));
    return out;
}

double case_proportion(const Theta& theta, const JumpWeights& p, const CovariateMatrix& xs) {
    return mixture_mean(theta, p, xs);
}

}  // namespace ccsemi
