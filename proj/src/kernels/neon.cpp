#include "cqed/kernels.hpp"

#include <arm_neon.h>

#include <cstdint>

namespace cqed::kernels::neon {

namespace {

constexpr double kInvPi = 0.318309886183790671537767526745028724;

inline double clamped_tap(const double* in, std::ptrdiff_t n, const double* kernel, std::ptrdiff_t k,
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

void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area, double* out) {
    const double hw = 0.5 * fwhm;
    const double hw2 = hw * hw;
    const double coef = area * hw * kInvPi;
    const float64x2_t vc = vdupq_n_f64(center);
    const float64x2_t vhw2 = vdupq_n_f64(hw2);
    const float64x2_t vcoef = vdupq_n_f64(coef);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(e + i), vc);
        const float64x2_t den = vfmaq_f64(vhw2, d, d);
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), vdivq_f64(vcoef, den)));
    }
    for (; i < n; ++i) {
        const double d = e[i] - center;
        out[i] += coef / (d * d + hw2);
    }
}

void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k, double* out) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const auto sk = static_cast<std::ptrdiff_t>(k);
    const std::ptrdiff_t r = sk / 2;
    const std::ptrdiff_t begin = r < sn ? r : sn;
    const std::ptrdiff_t end = sn - r > begin ? sn - r : begin;

    for (std::ptrdiff_t i = 0; i < begin; ++i) out[i] = clamped_tap(in, sn, kernel, sk, i);
    std::ptrdiff_t i = begin;
    for (; i + 2 <= end; i += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        const double* base = in + (i - r);
        for (std::ptrdiff_t j = 0; j < sk; ++j) acc = vfmaq_n_f64(acc, vld1q_f64(base + j), kernel[j]);
        vst1q_f64(out + i, acc);
    }
    for (; i < sn; ++i) out[i] = clamped_tap(in, sn, kernel, sk, i);
}

double sum_squares(const double* v, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vld1q_f64(v + i);
        acc = vfmaq_f64(acc, a, a);
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += v[i] * v[i];
    return total;
}

} // namespace cqed::kernels::neon
