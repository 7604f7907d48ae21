#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "ccsemi/kernels.hpp"
#include "ccsemi/types.hpp"

namespace ccsemi::detail {

/// sum_i h_i (1, x_i) over the first `rows` rows of xs.
inline Eigen::VectorXd weighted_sum(const kernels::KernelSet& k, const double* h,
                                    const CovariateMatrix& xs, std::size_t rows) {
    const std::size_t dim = xs.cols();
    Eigen::VectorXd out(static_cast<Eigen::Index>(dim + 1));
    out(0) = k.sum(h, rows);
    for (std::size_t j = 0; j < dim; ++j)
        out(static_cast<Eigen::Index>(j + 1)) = k.dot(h, xs.column(j).data(), rows);
    return out;
}

/// sum_i h_i (1, x_i)(1, x_i)' over the first `rows` rows of xs.
inline Eigen::MatrixXd weighted_gram(const kernels::KernelSet& k, const double* h,
                                     const CovariateMatrix& xs, std::size_t rows) {
    const auto d = static_cast<Eigen::Index>(xs.cols() + 1);
    Eigen::MatrixXd out(d, d);
    const Eigen::VectorXd first = weighted_sum(k, h, xs, rows);
    out.col(0) = first;
    out.row(0) = first.transpose();
    for (Eigen::Index a = 1; a < d; ++a) {
        const double* xa = xs.column(static_cast<std::size_t>(a - 1)).data();
        for (Eigen::Index b = a; b < d; ++b) {
            const double* xb = xs.column(static_cast<std::size_t>(b - 1)).data();
            out(a, b) = out(b, a) = k.dot3(h, xa, xb, rows);
        }
    }
    return out;
}

inline Eigen::VectorXd weighted_sum(const kernels::KernelSet& k, const std::vector<double>& h,
                                    const CovariateMatrix& xs, std::size_t rows) {
    return weighted_sum(k, h.data(), xs, rows);
}

inline Eigen::MatrixXd weighted_gram(const kernels::KernelSet& k, const std::vector<double>& h,
                                     const CovariateMatrix& xs, std::size_t rows) {
    return weighted_gram(k, h.data(), xs, rows);
}

}  // namespace ccsemi::detail
