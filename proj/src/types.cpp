#include "ccsemi/types.hpp"

#include <cmath>
#include <string>

#include "ccsemi/error.hpp"
#include "ccsemi/kernels.hpp"

namespace ccsemi {

Theta Theta::from_vector(const Eigen::VectorXd& v) {
    if (v.size() < 1) throw ArgumentError("theta vector must hold at least the intercept");
    Theta t;
    t.alpha = v(0);
    t.beta.assign(v.data() + 1, v.data() + v.size());
    return t;
}

Eigen::VectorXd Theta::to_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(beta.size() + 1));
    v(0) = alpha;
    for (std::size_t k = 0; k < beta.size(); ++k) v(static_cast<Eigen::Index>(k + 1)) = beta[k];
    return v;
}

double Theta::norm() const { return to_vector().norm(); }

bool Theta::is_finite() const {
    if (!std::isfinite(alpha)) return false;
    for (double b : beta)
        if (!std::isfinite(b)) return false;
    return true;
}

std::vector<double> CovariateMatrix::row(std::size_t i) const {
    std::vector<double> r(cols_);
    for (std::size_t k = 0; k < cols_; ++k) r[k] = (*this)(i, k);
    return r;
}

CovariateMatrix CovariateMatrix::slice_rows(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw ArgumentError("row slice out of range");
    CovariateMatrix out(count, cols_);
    for (std::size_t k = 0; k < cols_; ++k) {
        auto src = column(k).subspan(first, count);
        auto dst = out.column(k);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

SemiSupervisedDataset::SemiSupervisedDataset(std::vector<LabeledObservation> labeled,
                                             std::vector<std::vector<double>> unlabeled) {
    if (labeled.empty()) throw DataError("labeled data are empty");
    dim_ = labeled.front().x.size();
    if (dim_ == 0) throw ArgumentError("covariate dimension must be at least 1");

    const std::size_t n = labeled.size();
    const std::size_t total = n + unlabeled.size();
    covariates_ = CovariateMatrix(total, dim_);
    labels_.resize(n);

    auto put_row = [&](std::size_t i, const std::vector<double>& x, const char* kind) {
        if (x.size() != dim_)
            throw ArgumentError(std::string(kind) + " row " + std::to_string(i) + " has " +
                                std::to_string(x.size()) + " covariates, expected " +
                                std::to_string(dim_));
        for (std::size_t k = 0; k < dim_; ++k) {
            if (!std::isfinite(x[k]))
                throw ArgumentError(std::string(kind) + " row " + std::to_string(i) +
                                    " has a non-finite covariate");
            covariates_(i, k) = x[k];
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& obs = labeled[i];
        if (obs.y != 0 && obs.y != 1)
            throw ArgumentError("label of row " + std::to_string(i) + " is not 0 or 1");
        labels_[i] = obs.y;
        (obs.y == 1 ? n1_ : n0_) += 1;
        put_row(i, obs.x, "labeled");
    }
    for (std::size_t j = 0; j < unlabeled.size(); ++j) put_row(n + j, unlabeled[j], "unlabeled");

    if (n1_ == 0) throw DataError("labeled data contain no cases (y = 1)");
    if (n0_ == 0) throw DataError("labeled data contain no controls (y = 0)");
}

std::vector<LabeledObservation> SemiSupervisedDataset::labeled() const {
    std::vector<LabeledObservation> out(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        out[i].y = static_cast<int>(labels_[i]);
        out[i].x = covariates_.row(i);
    }
    return out;
}

std::vector<std::vector<double>> SemiSupervisedDataset::unlabeled() const {
    std::vector<std::vector<double>> out;
    out.reserve(unlabeled_count());
    for (std::size_t i = labels_.size(); i < covariates_.rows(); ++i) out.push_back(covariates_.row(i));
    return out;
}

JumpWeights JumpWeights::uniform(std::size_t n) {
    if (n == 0) throw ArgumentError("jump weights need at least one atom");
    return JumpWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double JumpWeights::sum() const { return kernels::active().sum(mass_.data(), mass_.size()); }

bool JumpWeights::all_positive() const {
    for (double m : mass_)
        if (!(m > 0.0)) return false;
    return true;
}

JumpWeights JumpWeights::normalized() const {
    const double s = sum();
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("jump weights have no positive mass");
    std::vector<double> out(mass_);
    for (double& m : out) m /= s;
    return JumpWeights(std::move(out));
}

std::optional<Eigen::VectorXd> FitResult::standard_errors() const {
    if (!theta_cov) return std::nullopt;
    return theta_cov->diagonal().cwiseMax(0.0).cwiseSqrt().eval();
}

}  // namespace ccsemi
