#pragma once

// Data-parallel inner loops of spectrum synthesis and fitting.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are selected once at runtime from the CPU
// features. Set CQED_KERNELS=scalar in the environment, or call set_backend(),
// to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cqed::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view to_string(Backend b) noexcept;
bool available(Backend b) noexcept;
Backend active_backend() noexcept;
// Throws InvalidInput if the backend is not available on this machine.
void set_backend(Backend b);

// out[i] += area * (hw/pi) / ((energies[i] - center)^2 + hw^2), hw = fwhm/2
void accumulate_lorentzian(std::span<const double> energies, double center, double fwhm, double area,
                           std::span<double> out);

// Discrete convolution with edge-clamped (replicated) padding:
// out[i] = sum_k kernel[k] * input[clamp(i + k - r)], r = kernel.size() / 2.
// kernel.size() must be odd; input and out must not alias.
void convolve_clamped(std::span<const double> input, std::span<const double> kernel, std::span<double> out);

double sum_squares(std::span<const double> values);

// Per-ISA entry points, exposed for equivalence tests. Raw pointers keep the
// SIMD translation units free of shared inline template code.
namespace scalar {
void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area, double* out);
void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k, double* out);
double sum_squares(const double* v, std::size_t n);
} // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area, double* out);
void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k, double* out);
double sum_squares(const double* v, std::size_t n);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void accumulate_lorentzian(const double* e, std::size_t n, double center, double fwhm, double area, double* out);
void convolve_clamped(const double* in, std::size_t n, const double* kernel, std::size_t k, double* out);
double sum_squares(const double* v, std::size_t n);
} // namespace neon
#endif

} // namespace cqed::kernels
