#pragma once

#include "cqed/model_core.hpp"
#include "cqed/tuning.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cqed {

// Detection efficiencies of the exciton and photon channels. A dressed branch
// with exciton fraction x is emitted with area eta_x x + eta_c (1 - x).
struct EmissionModel {
    double eta_x = 1.0;
    double eta_c = 0.5;
    double background = 0.0;  // counts, flat
};

void validate(const EmissionModel& em);

// Sampled PL spectrum at one temperature. The energy grid is uniform and
// strictly increasing; resolution_fwhm is the Gaussian instrument response
// (0 disables it).
struct Spectrum {
    double temperature = 0.0;
    std::vector<double> energies;
    std::vector<double> intensities;
    double resolution_fwhm = 0.0;
};

void validate(const Spectrum& s);

// Spacing of a uniform grid; throws InvalidInput if the grid has fewer than two
// points, is not increasing, or deviates from uniform by more than 1e-9 relative.
double grid_step(std::span<const double> energies);

struct GridSpec {
    double step = 0.01;        // meV
    double half_width = 3.0;   // meV
    std::optional<double> center;  // default: mean bare energy at each temperature
};

// Odd-length grid symmetric about center: center + i*step, |i| <= round(half_width/step).
std::vector<double> make_grid(double center, double half_width, double step);

// Area-normalized Lorentzian density (1/meV).
double lorentzian(double e, double center, double fwhm);

// Unit-sum sampled Gaussian of the given FWHM, truncated at 5 sigma. Returns {1}
// when the response is narrower than the grid can represent.
std::vector<double> instrument_kernel(double resolution_fwhm, double step);

struct Line {
    double center = 0.0;
    double fwhm = 0.0;
    double area = 0.0;
};

// background + (sum of Lorentzian lines) convolved with the instrument kernel.
std::vector<double> render_lines(std::span<const double> energies, std::span<const Line> lines, double background,
                                 double resolution_fwhm);

// Emission lines of the coupled system: the two dressed branches, or the two
// bare lines when g == 0. Sorted upper first.
std::vector<Line> doublet_lines(const CoupledSystem& sys, const EmissionModel& em);

// Spectrum of the dressed doublet on the given grid. A grid coarser than a
// quarter of the narrowest line is reported through `warnings` (if given).
Spectrum doublet_spectrum(const CoupledSystem& sys, const EmissionModel& em, std::span<const double> energies,
                          double resolution_fwhm, double temperature = 0.0,
                          std::vector<std::string>* warnings = nullptr);

// One spectrum per temperature, in input order.
std::vector<Spectrum> simulate_series(const TuningModel& model, double g, const EmissionModel& em,
                                      std::span<const double> temperatures, const GridSpec& grid,
                                      double resolution_fwhm, std::vector<std::string>* warnings = nullptr);

// Independent Gaussian noise per sample, clamped at zero; deterministic per seed.
Spectrum add_noise(const Spectrum& s, double sigma, std::uint64_t seed);

} // namespace cqed
