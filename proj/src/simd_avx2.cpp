// AVX2+FMA kernels. Compiled with -mavx2 -mfma; only reached through
// avx2_kernels() after the runtime feature check in simd_dispatch.cpp.

#include "kaf/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace kaf::simd::detail {
namespace {

// exp(x) = 2^n exp(r), x = n ln2 + r with |r| <= ln2/2; exp(r) from its
// degree-13 Taylor polynomial, 2^n applied through the exponent bits.
inline __m256d exp_pd(__m256d x) {
    const __m256d lo_cut = _mm256_set1_pd(-708.3);
    const __m256d hi_cut = _mm256_set1_pd(709.7);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51

    const __m256d underflow = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

    const __m256d fn = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(fn, c1, x);
    r = _mm256_fnmadd_pd(fn, c2, r);

    double inv_fact[14];
    inv_fact[0] = 1.0;
    for (int k = 1; k < 14; ++k) inv_fact[k] = inv_fact[k - 1] / k;
    __m256d e = _mm256_set1_pd(inv_fact[13]);
    for (int k = 12; k >= 0; --k) e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(inv_fact[k]));

    const __m256i n = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(fn, magic)),
                                       _mm256_castpd_si256(magic));
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, e);
}

void accumulate_sq_diff(const double* col, double x, double* out, std::size_t n) {
    const __m256d xv = _mm256_set1_pd(x);
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(col + m), xv);
        _mm256_storeu_pd(out + m, _mm256_fmadd_pd(t, t, _mm256_loadu_pd(out + m)));
    }
    for (; m < n; ++m) {
        const double t = col[m] - x;
        out[m] = std::fma(t, t, out[m]);
    }
}

void exp_neg_scaled(double* v, double scale, std::size_t n) {
    const __m256d s = _mm256_set1_pd(-scale);
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        _mm256_storeu_pd(v + m, exp_pd(_mm256_mul_pd(_mm256_loadu_pd(v + m), s)));
    }
    if (m < n) {
        alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = m; k < n; ++k) tail[k - m] = v[k];
        _mm256_store_pd(tail, exp_pd(_mm256_mul_pd(_mm256_load_pd(tail), s)));
        for (std::size_t k = m; k < n; ++k) v[k] = tail[k - m];
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + m), _mm256_loadu_pd(b + m), acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; m < n; ++m) s = std::fma(a[m], b[m], s);
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        _mm256_storeu_pd(y + m, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + m), _mm256_loadu_pd(y + m)));
    }
    for (; m < n; ++m) y[m] = std::fma(a, x[m], y[m]);
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", accumulate_sq_diff, exp_neg_scaled, dot, axpy};
    return table;
}

}  // namespace kaf::simd::detail
