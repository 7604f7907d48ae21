#include <algorithm>
#include <cmath>
#include <limits>

#include "ccsemi/kernels.hpp"

namespace ccsemi::kernels {
namespace {

void affine(const double* cols, std::size_t rows, std::size_t dim, double offset,
            const double* coef, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = offset;
    for (std::size_t k = 0; k < dim; ++k) {
        const double* col = cols + k * rows;
        const double c = coef[k];
        for (std::size_t i = 0; i < rows; ++i) out[i] += c * col[i];
    }
}

void logistic(const double* t, std::size_t n, double* phi, double* comp) {
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(-std::fabs(t[i]));
        const double inv = 1.0 / (1.0 + e);
        if (t[i] >= 0.0) {
            phi[i] = inv;
            comp[i] = e * inv;
        } else {
            phi[i] = e * inv;
            comp[i] = inv;
        }
    }
}

double neg_bernoulli_loglik(const double* t, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lin = std::max(t[i], 0.0) - y[i] * t[i];
        acc += lin + std::log1p(std::exp(-std::fabs(t[i])));
    }
    return acc;
}

double sum_log(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0)) return -std::numeric_limits<double>::infinity();
        acc += std::log(v[i]);
    }
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i] * c[i];
    return acc;
}

void jump_update(const double* phi, const double* comp, std::size_t n, double case_coef,
                 double control_coef, double offset, double* out) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = 1.0 / (case_coef * phi[i] + control_coef * comp[i] + offset);
}

void vexp(const double* x, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void vlog(const double* x, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

constexpr KernelSet kScalar{
    "scalar", affine, logistic, neg_bernoulli_loglik, sum_log, sum, dot, dot3, jump_update,
    vexp,     vlog,
};

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

}  // namespace ccsemi::kernels
