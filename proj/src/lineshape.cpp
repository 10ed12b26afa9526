#include "cqed/lineshape.hpp"

#include "cqed/errors.hpp"
#include "cqed/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace cqed {

void validate(const EmissionModel& em) {
    if (!std::isfinite(em.eta_x) || !std::isfinite(em.eta_c) || !std::isfinite(em.background))
        throw InvalidInput("emission model: non-finite value");
    if (em.eta_x < 0.0 || em.eta_c < 0.0) throw InvalidInput("emission model: efficiencies must be >= 0");
    if (em.eta_x + em.eta_c <= 0.0) throw InvalidInput("emission model: eta_x + eta_c must be positive");
    if (em.background < 0.0) throw InvalidInput("emission model: background must be >= 0");
}

double grid_step(std::span<const double> e) {
    if (e.size() < 2) throw InvalidInput("energy grid needs at least two points");
    const double step = (e.back() - e.front()) / static_cast<double>(e.size() - 1);
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("energy grid must be strictly increasing");
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double d = e[i] - e[i - 1];
        if (!(d > 0.0)) throw InvalidInput("energy grid must be strictly increasing");
        if (std::abs(d - step) > 1e-9 * step + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(e[i]))
            throw InvalidInput("energy grid must be uniformly spaced");
    }
    return step;
}

void validate(const Spectrum& s) {
    if (!std::isfinite(s.temperature) || s.temperature < 0.0) throw InvalidInput("spectrum: invalid temperature");
    if (!std::isfinite(s.resolution_fwhm) || s.resolution_fwhm < 0.0)
        throw InvalidInput("spectrum: resolution must be >= 0");
    if (s.energies.size() != s.intensities.size()) throw InvalidInput("spectrum: energy/intensity size mismatch");
    grid_step(s.energies);
    for (double v : s.intensities)
        if (!std::isfinite(v) || v < 0.0) throw InvalidInput("spectrum: intensities must be finite and >= 0");
}

std::vector<double> make_grid(double center, double half_width, double step) {
    if (!std::isfinite(center) || !(half_width > 0.0) || !(step > 0.0) || step > half_width)
        throw InvalidInput("grid: need finite center and 0 < step <= half_width");
    const auto n_half = static_cast<long>(std::lround(half_width / step));
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(2 * n_half + 1));
    for (long i = -n_half; i <= n_half; ++i) e.push_back(center + static_cast<double>(i) * step);
    return e;
}

double lorentzian(double e, double center, double fwhm) {
    if (!(fwhm > 0.0)) throw InvalidInput("lorentzian: fwhm must be positive");
    const double hw = 0.5 * fwhm;
    const double d = e - center;
    return std::numbers::inv_pi * hw / (d * d + hw * hw);
}

std::vector<double> instrument_kernel(double resolution_fwhm, double step) {
    if (!(step > 0.0)) throw InvalidInput("instrument kernel: step must be positive");
    if (resolution_fwhm < 0.0 || !std::isfinite(resolution_fwhm))
        throw InvalidInput("instrument kernel: resolution must be >= 0");
    const double sigma = resolution_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const auto radius = static_cast<long>(std::ceil(5.0 * sigma / step));
    if (sigma == 0.0 || radius < 1) return {1.0};
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (long j = -radius; j <= radius; ++j) {
        const double x = static_cast<double>(j) * step / sigma;
        const double w = std::exp(-0.5 * x * x);
        k[static_cast<std::size_t>(j + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

std::vector<double> render_lines(std::span<const double> energies, std::span<const Line> lines, double background,
                                 double resolution_fwhm) {
    std::vector<double> raw(energies.size(), 0.0);
    for (const Line& l : lines) {
        if (!(l.fwhm > 0.0)) throw InvalidInput("render_lines: line width must be positive");
        kernels::accumulate_lorentzian(energies, l.center, l.fwhm, l.area, raw);
    }
    std::vector<double> out(energies.size());
    if (resolution_fwhm > 0.0) {
        const auto kernel = instrument_kernel(resolution_fwhm, grid_step(energies));
        kernels::convolve_clamped(raw, kernel, out);
    } else {
        out = raw;
    }
    if (background != 0.0)
        for (double& v : out) v += background;
    return out;
}

std::vector<Line> doublet_lines(const CoupledSystem& sys, const EmissionModel& em) {
    validate(sys);
    validate(em);
    if (sys.g == 0.0) {
        Line qd{sys.e_qd, sys.gamma_qd, em.eta_x};
        Line cm{sys.e_c, sys.gamma_cm, em.eta_c};
        if (qd.center >= cm.center) return {qd, cm};
        return {cm, qd};
    }
    const auto st = dressed_states(sys);
    const double x = st.exciton_fraction_upper;
    const double y = st.exciton_fraction_lower;
    return {Line{st.e_upper, st.gamma_upper, em.eta_x * x + em.eta_c * y},
            Line{st.e_lower, st.gamma_lower, em.eta_x * y + em.eta_c * x}};
}

Spectrum doublet_spectrum(const CoupledSystem& sys, const EmissionModel& em, std::span<const double> energies,
                          double resolution_fwhm, double temperature, std::vector<std::string>* warnings) {
    const double step = grid_step(energies);
    const auto lines = doublet_lines(sys, em);
    if (warnings != nullptr) {
        const double narrowest = std::min(lines[0].fwhm, lines[1].fwhm);
        if (step > narrowest / 4.0) {
            std::ostringstream msg;
            msg << "grid step " << step << " meV is coarser than a quarter of the narrowest linewidth ("
                << narrowest << " meV) at T = " << temperature << " K";
            warnings->push_back(msg.str());
        }
    }
    Spectrum s;
    s.temperature = temperature;
    s.resolution_fwhm = resolution_fwhm;
    s.energies.assign(energies.begin(), energies.end());
    s.intensities = render_lines(energies, lines, em.background, resolution_fwhm);
    return s;
}

std::vector<Spectrum> simulate_series(const TuningModel& model, double g, const EmissionModel& em,
                                      std::span<const double> temperatures, const GridSpec& grid,
                                      double resolution_fwhm, std::vector<std::string>* warnings) {
    validate(model);
    if (temperatures.empty()) throw InvalidInput("simulate_series: no temperatures");
    std::vector<Spectrum> series;
    series.reserve(temperatures.size());
    for (double t : temperatures) {
        const CoupledSystem sys = system_at(model, g, t);
        const double center = grid.center.value_or(0.5 * (sys.e_qd + sys.e_c));
        const auto energies = make_grid(center, grid.half_width, grid.step);
        series.push_back(doublet_spectrum(sys, em, energies, resolution_fwhm, t, warnings));
    }
    return series;
}

Spectrum add_noise(const Spectrum& s, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("add_noise: sigma must be >= 0");
    Spectrum out = s;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.intensities) v = std::max(0.0, v + noise(rng));
    return out;
}

} // namespace cqed
