#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops of the estimator. Every routine exists as a
// scalar reference and, on x86-64, as an AVX2/FMA variant; `active()`
// returns the fastest set the running CPU supports. Variants agree to a few
// ulps per element; reductions may differ by reassociation.
//
// Within one set, `sum` and `dot` accumulate in the same lane order, so
// dot(a, b) with a constant power-of-two `a` is exactly that multiple of
// sum(b).

namespace ccsemi::kernels {

struct KernelSet {
    std::string_view name;

    /// out[i] = offset + sum_k coef[k] * cols[k * rows + i]  (column-major input)
    void (*affine)(const double* cols, std::size_t rows, std::size_t dim, double offset,
                   const double* coef, double* out);

    /// phi[i] = 1 / (1 + exp(-t[i])), comp[i] = 1 - phi[i], each without cancellation.
    void (*logistic)(const double* t, std::size_t n, double* phi, double* comp);

    /// sum_i softplus(t[i]) - y[i] * t[i]: the negated Bernoulli log-likelihood.
    double (*neg_bernoulli_loglik)(const double* t, const double* y, std::size_t n);

    /// sum_i log(v[i]); -inf when any entry is <= 0 or NaN.
    double (*sum_log)(const double* v, std::size_t n);

    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);

    /// out[i] = 1 / (case_coef * phi[i] + control_coef * comp[i] + offset)
    void (*jump_update)(const double* phi, const double* comp, std::size_t n, double case_coef,
                        double control_coef, double offset, double* out);

    void (*exp)(const double* x, std::size_t n, double* out);
    void (*log)(const double* x, std::size_t n, double* out);
};

const KernelSet& scalar_kernels();

/// nullptr when the library was built without AVX2 or the CPU lacks AVX2+FMA.
const KernelSet* avx2_kernels();

/// Selected once from the CPU; `CCSEMI_KERNELS=scalar` in the environment
/// forces the reference path.
const KernelSet& active();

/// Overrides the selection for the whole process. Not meant to be called
/// while fits are running on other threads.
void set_active(const KernelSet& set);

}  // namespace ccsemi::kernels
