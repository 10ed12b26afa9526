#include "cqed/kernels.hpp"

#include <algorithm>
#include <numbers>

namespace cqed::kernels::scalar {

void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area, double* out) {
    const double hw = 0.5 * fwhm;
    const double hw2 = hw * hw;
    const double coef = area * hw * std::numbers::inv_pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = e[i] - center;
        out[i] += coef / (d * d + hw2);
    }
}

void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k, double* out) {
    const auto r = static_cast<std::ptrdiff_t>(k / 2);
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    for (std::ptrdiff_t i = 0; i <= last; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(k); ++j) {
            const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(i + j - r, 0, last);
            acc += kernel[j] * in[src];
        }
        out[i] = acc;
    }
}

double sum_squares(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return acc;
}

} // namespace cqed::kernels::scalar
