#include "ccsemi/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ccsemi/error.hpp"
#include "ccsemi/kernels.hpp"
#include "detail/weighted.hpp"

namespace ccsemi {
namespace {

using detail::weighted_gram;
using detail::weighted_sum;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_theta(const Theta& theta, std::size_t dim) {
    if (theta.dim() != dim)
        throw ArgumentError("theta has " + std::to_string(theta.dim()) + " slopes, data have " +
                            std::to_string(dim) + " covariates");
}

void check_weights(const JumpWeights& p, std::size_t rows) {
    if (p.size() != rows)
        throw ArgumentError("jump weights have length " + std::to_string(p.size()) + ", expected " +
                            std::to_string(rows));
}

}  // namespace

double phi(std::span<const double> x, const Theta& theta) {
    if (x.size() != theta.dim())
        throw ArgumentError("covariate vector has length " + std::to_string(x.size()) +
                            ", theta expects " + std::to_string(theta.dim()));
    double t = theta.alpha;
    for (std::size_t k = 0; k < x.size(); ++k) t += theta.beta[k] * x[k];
    const double e = std::exp(-std::fabs(t));
    return t >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

LinkValues evaluate_link(const Theta& theta, const CovariateMatrix& xs) {
    check_theta(theta, xs.cols());
    const auto& k = kernels::active();
    const std::size_t rows = xs.rows();
    LinkValues link{std::vector<double>(rows), std::vector<double>(rows), std::vector<double>(rows)};
    k.affine(xs.data(), rows, xs.cols(), theta.alpha, theta.beta.data(), link.t.data());
    k.logistic(link.t.data(), rows, link.phi.data(), link.comp.data());
    return link;
}

MixtureTerms mixture_terms(const LinkValues& link, const JumpWeights& p) {
    check_weights(p, link.phi.size());
    const auto& k = kernels::active();
    const double* pv = p.values().data();
    const std::size_t n = p.size();
    const double total = k.sum(pv, n);
    return {k.dot(link.phi.data(), pv, n), k.dot(link.comp.data(), pv, n) + (1.0 - total)};
}

double mixture_mean(const Theta& theta, const JumpWeights& p, const CovariateMatrix& xs) {
    check_weights(p, xs.rows());
    return mixture_terms(evaluate_link(theta, xs), p).c;
}

namespace {

double objective_from_link(const LinkValues& link, const JumpWeights& p,
                           const SemiSupervisedDataset& data) {
    const auto& k = kernels::active();
    const MixtureTerms m = mixture_terms(link, p);
    if (!(m.c > 0.0) || !(m.one_minus_c > 0.0)) return kNegInf;
    const double labeled =
        -k.neg_bernoulli_loglik(link.t.data(), data.labels().data(), data.labeled_count());
    return labeled - static_cast<double>(data.n1()) * std::log(m.c) -
           static_cast<double>(data.n0()) * std::log(m.one_minus_c);
}

}  // namespace

double theta_objective(const Theta& theta, const JumpWeights& p, const SemiSupervisedDataset& data) {
    check_weights(p, data.total_count());
    return objective_from_link(evaluate_link(theta, data.covariates()), p, data);
}

double log_likelihood(const Theta& theta, const JumpWeights& p, const SemiSupervisedDataset& data) {
    check_weights(p, data.total_count());
    check_theta(theta, data.dim());
    const double log_mass = kernels::active().sum_log(p.values().data(), p.size());
    if (log_mass == kNegInf) return kNegInf;
    const double q = objective_from_link(evaluate_link(theta, data.covariates()), p, data);
    if (q == kNegInf) return kNegInf;
    return q + log_mass;
}

ObjectiveDerivatives theta_objective_derivatives(const Theta& theta, const JumpWeights& p,
                                                 const SemiSupervisedDataset& data) {
    check_weights(p, data.total_count());
    const auto& k = kernels::active();
    const CovariateMatrix& xs = data.covariates();
    const std::size_t n = data.labeled_count();
    const std::size_t total = data.total_count();
    const LinkValues link = evaluate_link(theta, xs);
    const MixtureTerms m = mixture_terms(link, p);
    if (!(m.c > 0.0) || !(m.one_minus_c > 0.0))
        throw NumericalError("mixture mean left (0, 1) while differentiating the objective");

    ObjectiveDerivatives out;
    out.value = objective_from_link(link, p, data);

    const auto y = data.labels();
    std::vector<double> resid(n), w(total), wp(total), curv(total);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] * link.comp[i] - (1.0 - y[i]) * link.phi[i];
    for (std::size_t i = 0; i < total; ++i) {
        w[i] = link.phi[i] * link.comp[i];
        wp[i] = w[i] * p[i];
        curv[i] = wp[i] * (link.comp[i] - link.phi[i]);
    }

    const double n1 = static_cast<double>(data.n1());
    const double n0 = static_cast<double>(data.n0());
    const double slope = n1 / m.c - n0 / m.one_minus_c;
    const double bend = n1 / (m.c * m.c) + n0 / (m.one_minus_c * m.one_minus_c);

    const Eigen::VectorXd g = weighted_sum(k, wp, xs, total);
    out.gradient = weighted_sum(k, resid, xs, n) - slope * g;
    out.hessian = -weighted_gram(k, w, xs, n) - slope * weighted_gram(k, curv, xs, total) +
                  bend * (g * g.transpose());
    return out;
}

Eigen::VectorXd grad_theta_objective(const Theta& theta, const JumpWeights& p,
                                     const SemiSupervisedDataset& data) {
    return theta_objective_derivatives(theta, p, data).gradient;
}

}  // namespace ccsemi
