#include "cqed/kernels.hpp"

#include "cqed/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace cqed::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(CQED_KERNELS_AVX2)
    static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return has;
#else
    return false;
#endif
}

Backend detect() noexcept {
    if (const char* env = std::getenv("CQED_KERNELS"); env != nullptr && std::string(env) == "scalar")
        return Backend::scalar;
#if defined(CQED_KERNELS_NEON)
    return Backend::neon;
#else
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
#endif
}

std::atomic<Backend>& current() noexcept {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

} // namespace

std::string_view to_string(Backend b) noexcept {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "unknown";
}

bool available(Backend b) noexcept {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    case Backend::neon:
#if defined(CQED_KERNELS_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Backend active_backend() noexcept {
    return current().load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    if (!available(b)) throw InvalidInput("kernel backend '" + std::string(to_string(b)) + "' not available");
    current().store(b, std::memory_order_relaxed);
}

void accumulate_lorentzian(std::span<const double> energies, double center, double fwhm, double area,
                           std::span<double> out) {
    if (out.size() != energies.size()) throw InvalidInput("accumulate_lorentzian: size mismatch");
    switch (active_backend()) {
#if defined(CQED_KERNELS_AVX2)
    case Backend::avx2:
        avx2::accumulate_lorentzian(energies.data(), energies.size(), center, fwhm, area, out.data());
        return;
#endif
#if defined(CQED_KERNELS_NEON)
    case Backend::neon:
        neon::accumulate_lorentzian(energies.data(), energies.size(), center, fwhm, area, out.data());
        return;
#endif
    default:
        scalar::accumulate_lorentzian(energies.data(), energies.size(), center, fwhm, area, out.data());
    }
}

void convolve_clamped(std::span<const double> input, std::span<const double> kernel, std::span<double> out) {
    if (out.size() != input.size()) throw InvalidInput("convolve_clamped: size mismatch");
    if (kernel.size() % 2 == 0) throw InvalidInput("convolve_clamped: kernel length must be odd");
    if (input.empty()) return;
    switch (active_backend()) {
#if defined(CQED_KERNELS_AVX2)
    case Backend::avx2:
        avx2::convolve_clamped(input.data(), input.size(), kernel.data(), kernel.size(), out.data());
        return;
#endif
#if defined(CQED_KERNELS_NEON)
    case Backend::neon:
        neon::convolve_clamped(input.data(), input.size(), kernel.data(), kernel.size(), out.data());
        return;
#endif
    default:
        scalar::convolve_clamped(input.data(), input.size(), kernel.data(), kernel.size(), out.data());
    }
}

double sum_squares(std::span<const double> values) {
    switch (active_backend()) {
#if defined(CQED_KERNELS_AVX2)
    case Backend::avx2: return avx2::sum_squares(values.data(), values.size());
#endif
#if defined(CQED_KERNELS_NEON)
    case Backend::neon: return neon::sum_squares(values.data(), values.size());
#endif
    default: return scalar::sum_squares(values.data(), values.size());
    }
}

} // namespace cqed::kernels
