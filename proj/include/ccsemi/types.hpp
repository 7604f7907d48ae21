#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ccsemi {

/// Logistic parameters: intercept plus one slope per covariate (log-odds units).
struct Theta {
    double alpha = 0.0;
    std::vector<double> beta;

    Theta() = default;
    Theta(double a, std::vector<double> b) : alpha(a), beta(std::move(b)) {}

    static Theta zeros(std::size_t dim) { return Theta(0.0, std::vector<double>(dim, 0.0)); }

    /// (alpha, beta_1, ..., beta_p)
    static Theta from_vector(const Eigen::VectorXd& v);
    Eigen::VectorXd to_vector() const;

    std::size_t dim() const noexcept { return beta.size(); }
    double norm() const;
    bool is_finite() const;
};

struct LabeledObservation {
    int y = 0;
    std::vector<double> x;
};

/// Dense rows x cols matrix stored column by column so that each covariate
/// is one contiguous array for the vector kernels.
class CovariateMatrix {
public:
    CovariateMatrix() = default;
    CovariateMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> column(std::size_t k) const {
        return {data_.data() + k * rows_, rows_};
    }
    std::span<double> column(std::size_t k) { return {data_.data() + k * rows_, rows_}; }

    double operator()(std::size_t i, std::size_t k) const { return data_[k * rows_ + i]; }
    double& operator()(std::size_t i, std::size_t k) { return data_[k * rows_ + i]; }

    std::vector<double> row(std::size_t i) const;
    const double* data() const noexcept { return data_.data(); }

    /// Rows [first, first + count) as a new matrix.
    CovariateMatrix slice_rows(std::size_t first, std::size_t count) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Case-control labeled rows plus unlabeled covariate rows.
///
/// Atoms are indexed 0..N-1 with the labeled rows first (in the order given)
/// followed by the unlabeled rows; jump masses use the same order.
class SemiSupervisedDataset {
public:
    /// Throws DataError when a class is empty and ArgumentError on ragged or
    /// non-finite covariates.
    SemiSupervisedDataset(std::vector<LabeledObservation> labeled,
                          std::vector<std::vector<double>> unlabeled);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t labeled_count() const noexcept { return labels_.size(); }
    std::size_t unlabeled_count() const noexcept { return covariates_.rows() - labels_.size(); }
    std::size_t total_count() const noexcept { return covariates_.rows(); }
    std::size_t n1() const noexcept { return n1_; }
    std::size_t n0() const noexcept { return n0_; }

    /// All N covariate rows, labeled first.
    const CovariateMatrix& covariates() const noexcept { return covariates_; }
    /// Labels of the first n rows as 0.0 / 1.0.
    std::span<const double> labels() const noexcept { return labels_; }

    std::vector<LabeledObservation> labeled() const;
    std::vector<std::vector<double>> unlabeled() const;

private:
    std::size_t dim_ = 0;
    std::size_t n1_ = 0;
    std::size_t n0_ = 0;
    CovariateMatrix covariates_;
    std::vector<double> labels_;
};

/// Point masses of the discrete covariate distribution, one per atom.
class JumpWeights {
public:
    JumpWeights() = default;
    explicit JumpWeights(std::vector<double> mass) : mass_(std::move(mass)) {}

    static JumpWeights uniform(std::size_t n);

    std::size_t size() const noexcept { return mass_.size(); }
    double operator[](std::size_t i) const { return mass_[i]; }
    double& operator[](std::size_t i) { return mass_[i]; }
    std::span<const double> values() const noexcept { return mass_; }
    std::span<double> values() noexcept { return mass_; }

    double sum() const;
    bool all_positive() const;
    JumpWeights normalized() const;

private:
    std::vector<double> mass_;
};

struct FitResult {
    Theta theta_hat;
    JumpWeights p_hat;
    double loglik = 0.0;
    std::vector<double> loglik_trace;
    int iterations = 0;
    bool converged = false;
    double case_proportion = 0.0;
    /// Estimated covariance of theta_hat; empty when the information matrix
    /// could not be inverted (a warning explains why).
    std::optional<Eigen::MatrixXd> theta_cov;
    std::vector<std::string> warnings;

    /// Square roots of the covariance diagonal, when available.
    std::optional<Eigen::VectorXd> standard_errors() const;
};

}  // namespace ccsemi
