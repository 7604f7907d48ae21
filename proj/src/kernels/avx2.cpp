// AVX2 + FMA variants of the kernels in kernels.hpp. This file is compiled
// with -mavx2 -mfma and must only be reached through the runtime dispatcher.
// It deliberately avoids the standard library so no AVX-encoded inline
// function can leak into other translation units.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "internal.hpp"

namespace ccsemi::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256i tail_mask(std::size_t remaining) {
    const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), idx);
}

inline double hsum(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// 0x1.8p52: adding it to a double holding an integer k (|k| < 2^51) leaves k
// in the low mantissa bits.
inline __m256i to_int64(__m256d integral) {
    const __m256d kMagic = _mm256_set1_pd(6755399441055744.0);
    return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(integral, kMagic)),
                            _mm256_castpd_si256(kMagic));
}

inline __m256d pow2(__m256d integral) {
    const __m256i k = to_int64(integral);
    return _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(k, _mm256_set1_epi64x(1023)), 52));
}

// exp(x) with range reduction x = k ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial (truncation below 1e-17). 2^k is applied in two halves
// so that results in the subnormal range round once, like libm.
inline __m256d exp_pd(__m256d x) {
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d log2e = _mm256_set1_pd(1.44269504088896338700e+00);
    const __m256d overflow = _mm256_set1_pd(709.782712893384);
    const __m256d underflow = _mm256_set1_pd(-745.1332191019412);

    const __m256d xc = _mm256_max_pd(_mm256_min_pd(x, overflow), underflow);
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, xc);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.5)));
    const __m256d k2 = _mm256_sub_pd(k, k1);
    __m256d y = _mm256_mul_pd(_mm256_mul_pd(p, pow2(k1)), pow2(k2));

    const __m256d inf = _mm256_set1_pd(__builtin_inf());
    y = _mm256_blendv_pd(y, inf, _mm256_cmp_pd(x, overflow, _CMP_GT_OQ));
    y = _mm256_blendv_pd(y, _mm256_setzero_pd(), _mm256_cmp_pd(x, underflow, _CMP_LT_OQ));
    // NaN in, NaN out.
    return _mm256_blendv_pd(y, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
}

// log(x) for x > 0: x = 2^e m with m in [sqrt(1/2), sqrt(2)), then
// log m = 2 atanh(s), s = (m - 1) / (m + 1), as an odd series in s.
inline __m256d log_pd(__m256d x) {
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d min_normal = _mm256_set1_pd(2.2250738585072014e-308);
    const __m256d two52 = _mm256_set1_pd(4503599627370496.0);

    const __m256d subnormal = _mm256_cmp_pd(x, min_normal, _CMP_LT_OQ);
    const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, two52), subnormal);
    const __m256d e_adjust = _mm256_and_pd(subnormal, _mm256_set1_pd(-52.0));

    const __m256i bits = _mm256_castpd_si256(xs);
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    __m256d e = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))), two52);
    e = _mm256_add_pd(_mm256_sub_pd(e, _mm256_set1_pd(1023.0)), e_adjust);

    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

    const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);

    __m256d poly = _mm256_set1_pd(1.0 / 25.0);
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 23.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 21.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 19.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 17.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 15.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 13.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 11.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 9.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 7.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 5.0));
    poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 3.0));
    const __m256d r2 = _mm256_mul_pd(_mm256_add_pd(poly, poly), z);

    // log(1 + f) = f - (hfsq - s (hfsq + r2)) keeps the leading term exact.
    const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), f), f);
    const __m256d tail = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r2), _mm256_mul_pd(e, ln2_lo));
    __m256d y = _mm256_fmadd_pd(e, ln2_hi, _mm256_sub_pd(f, _mm256_sub_pd(hfsq, tail)));

    const __m256d inf = _mm256_set1_pd(__builtin_inf());
    y = _mm256_blendv_pd(y, inf, _mm256_cmp_pd(x, inf, _CMP_EQ_OQ));
    y = _mm256_blendv_pd(y, _mm256_set1_pd(-__builtin_inf()),
                         _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
    y = _mm256_blendv_pd(y, _mm256_set1_pd(__builtin_nan("")),
                         _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ));
    return _mm256_blendv_pd(y, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
}

// log1p(u) for u in [0, 1] via w = 1 + u and the correction -((w - 1) - u) / w.
inline __m256d log1p_unit_pd(__m256d u) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d w = _mm256_add_pd(one, u);
    const __m256d err = _mm256_sub_pd(_mm256_sub_pd(w, one), u);
    return _mm256_sub_pd(log_pd(w), _mm256_div_pd(err, w));
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline void logistic_pd(__m256d t, __m256d& phi, __m256d& comp) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(t)));
    const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_add_pd(_mm256_set1_pd(1.0), e));
    const __m256d einv = _mm256_mul_pd(e, inv);
    const __m256d nonneg = _mm256_cmp_pd(t, _mm256_setzero_pd(), _CMP_GE_OQ);
    phi = _mm256_blendv_pd(einv, inv, nonneg);
    comp = _mm256_blendv_pd(inv, einv, nonneg);
}

void affine(const double* cols, std::size_t rows, std::size_t dim, double offset,
            const double* coef, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= rows; i += kLanes) {
        __m256d acc = _mm256_set1_pd(offset);
        for (std::size_t k = 0; k < dim; ++k)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[k]), _mm256_loadu_pd(cols + k * rows + i), acc);
        _mm256_storeu_pd(out + i, acc);
    }
    if (i < rows) {
        const __m256i mask = tail_mask(rows - i);
        __m256d acc = _mm256_set1_pd(offset);
        for (std::size_t k = 0; k < dim; ++k)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[k]),
                                  _mm256_maskload_pd(cols + k * rows + i, mask), acc);
        _mm256_maskstore_pd(out + i, mask, acc);
    }
}

void logistic(const double* t, std::size_t n, double* phi, double* comp) {
    std::size_t i = 0;
    __m256d p, c;
    for (; i + kLanes <= n; i += kLanes) {
        logistic_pd(_mm256_loadu_pd(t + i), p, c);
        _mm256_storeu_pd(phi + i, p);
        _mm256_storeu_pd(comp + i, c);
    }
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        logistic_pd(_mm256_maskload_pd(t + i, mask), p, c);
        _mm256_maskstore_pd(phi + i, mask, p);
        _mm256_maskstore_pd(comp + i, mask, c);
    }
}

inline __m256d neg_bernoulli_term(__m256d t, __m256d y) {
    const __m256d lin = _mm256_fnmadd_pd(y, t, _mm256_max_pd(t, _mm256_setzero_pd()));
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(t)));
    return _mm256_add_pd(lin, log1p_unit_pd(e));
}

double neg_bernoulli_loglik(const double* t, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_add_pd(acc, neg_bernoulli_term(_mm256_loadu_pd(t + i), _mm256_loadu_pd(y + i)));
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        const __m256d term =
            neg_bernoulli_term(_mm256_maskload_pd(t + i, mask), _mm256_maskload_pd(y + i, mask));
        acc = _mm256_add_pd(acc, _mm256_and_pd(term, _mm256_castsi256_pd(mask)));
    }
    return hsum(acc);
}

double sum_log(const double* v, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = zero;
    __m256d bad = zero;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d x = _mm256_loadu_pd(v + i);
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(x, zero, _CMP_NGT_UQ));
        acc = _mm256_add_pd(acc, log_pd(x));
    }
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        const __m256d x = _mm256_blendv_pd(one, _mm256_maskload_pd(v + i, mask),
                                           _mm256_castsi256_pd(mask));
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(x, zero, _CMP_NGT_UQ));
        acc = _mm256_add_pd(acc, log_pd(x));
    }
    if (_mm256_movemask_pd(bad) != 0) return -__builtin_inf();
    return hsum(acc);
}

// sum, dot and dot3 share one accumulation pattern (two vector accumulators,
// masked tail into the first, fixed horizontal order).
double sum(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + kLanes));
    }
    for (; i < n; i += kLanes) {
        const __m256i mask = tail_mask(n - i);
        acc0 = _mm256_add_pd(acc0, _mm256_maskload_pd(a + i, mask));
    }
    return hsum(_mm256_add_pd(acc0, acc1));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes), acc1);
    }
    for (; i < n; i += kLanes) {
        const __m256i mask = tail_mask(n - i);
        acc0 = _mm256_fmadd_pd(_mm256_maskload_pd(a + i, mask), _mm256_maskload_pd(b + i, mask), acc0);
    }
    return hsum(_mm256_add_pd(acc0, acc1));
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        const __m256d ab0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d ab1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes));
        acc0 = _mm256_fmadd_pd(ab0, _mm256_loadu_pd(c + i), acc0);
        acc1 = _mm256_fmadd_pd(ab1, _mm256_loadu_pd(c + i + kLanes), acc1);
    }
    for (; i < n; i += kLanes) {
        const __m256i mask = tail_mask(n - i);
        const __m256d ab = _mm256_mul_pd(_mm256_maskload_pd(a + i, mask), _mm256_maskload_pd(b + i, mask));
        acc0 = _mm256_fmadd_pd(ab, _mm256_maskload_pd(c + i, mask), acc0);
    }
    return hsum(_mm256_add_pd(acc0, acc1));
}

void jump_update(const double* phi, const double* comp, std::size_t n, double case_coef,
                 double control_coef, double offset, double* out) {
    const __m256d a = _mm256_set1_pd(case_coef);
    const __m256d b = _mm256_set1_pd(control_coef);
    const __m256d m = _mm256_set1_pd(offset);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d den = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(a, _mm256_loadu_pd(phi + i)), _mm256_mul_pd(b, _mm256_loadu_pd(comp + i))), m);
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, den));
    }
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        const __m256d den = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(a, _mm256_maskload_pd(phi + i, mask)),
                          _mm256_mul_pd(b, _mm256_maskload_pd(comp + i, mask))),
            m);
        _mm256_maskstore_pd(out + i, mask, _mm256_div_pd(one, den));
    }
}

void vexp(const double* x, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        _mm256_maskstore_pd(out + i, mask, exp_pd(_mm256_maskload_pd(x + i, mask)));
    }
}

void vlog(const double* x, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, log_pd(_mm256_loadu_pd(x + i)));
    if (i < n) {
        const __m256i mask = tail_mask(n - i);
        const __m256d x1 = _mm256_blendv_pd(_mm256_set1_pd(1.0), _mm256_maskload_pd(x + i, mask),
                                            _mm256_castsi256_pd(mask));
        _mm256_maskstore_pd(out + i, mask, log_pd(x1));
    }
}

constexpr KernelSet kAvx2{
    "avx2", affine, logistic, neg_bernoulli_loglik, sum_log, sum, dot, dot3, jump_update,
    vexp,   vlog,
};

}  // namespace

const KernelSet& detail::avx2_kernel_set() { return kAvx2; }

}  // namespace ccsemi::kernels
