#include "cqed/kernels.hpp"

#include <immintrin.h>

#include <cstdint>

#define CQED_AVX2 __attribute__((target("avx2,fma")))

namespace cqed::kernels::avx2 {

namespace {

constexpr double kInvPi = 0.318309886183790671537767526745028724;

CQED_AVX2 inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Scalar tail/edge helper so that no code outside this file is compiled for AVX2.
CQED_AVX2 inline double clamped_tap(const double* in, std::ptrdiff_t n, const double* kernel, std::ptrdiff_t k,
                                     std::ptrdiff_t i) {
    const std::ptrdiff_t r = k / 2;
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < k; ++j) {
        std::ptrdiff_t src = i + j - r;
        src = src < 0 ? 0 : (src >= n ? n - 1 : src);
        acc += kernel[j] * in[src];
    }
    return acc;
}

} // namespace

CQED_AVX2 void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area,
                                     double* out) {
    const double hw = 0.5 * fwhm;
    const double hw2 = hw * hw;
    const double coef = area * hw * kInvPi;
    const __m256d vc = _mm256_set1_pd(center);
    const __m256d vhw2 = _mm256_set1_pd(hw2);
    const __m256d vcoef = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(e + i), vc);
        const __m256d den = _mm256_fmadd_pd(d, d, vhw2);
        const __m256d acc = _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_div_pd(vcoef, den));
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        const double d = e[i] - center;
        out[i] += coef / (d * d + hw2);
    }
}

CQED_AVX2 void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k,
                                double* out) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const auto sk = static_cast<std::ptrdiff_t>(k);
    const std::ptrdiff_t r = sk / 2;
    // Interior outputs [r, n - r) read in[i - r .. i + r] without clamping.
    const std::ptrdiff_t begin = r < sn ? r : sn;
    const std::ptrdiff_t end = sn - r > begin ? sn - r : begin;

    for (std::ptrdiff_t i = 0; i < begin; ++i) out[i] = clamped_tap(in, sn, kernel, sk, i);

    std::ptrdiff_t i = begin;
    for (; i + 4 <= end; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        const double* base = in + (i - r);
        for (std::ptrdiff_t j = 0; j < sk; ++j)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(kernel[j]), _mm256_loadu_pd(base + j), acc);
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < sn; ++i) out[i] = clamped_tap(in, sn, kernel, sk, i);
}

CQED_AVX2 double sum_squares(const double* v, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(v + i);
        const __m256d b = _mm256_loadu_pd(v + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    double total = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += v[i] * v[i];
    return total;
}

} // namespace cqed::kernels::avx2
