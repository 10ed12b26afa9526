#pragma once

#include "cqed/lineshape.hpp"
#include "cqed/lm.hpp"
#include "cqed/tuning.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cqed {

// One temperature of the anticrossing data: upper/lower branch positions,
// widths (FWHM) and areas. Variances are 0 when unknown.
struct PeakRow {
    double temperature = 0.0;
    double e_upper = 0.0;
    double e_lower = 0.0;
    double gamma_upper = 0.0;
    double gamma_lower = 0.0;
    double amp_upper = 0.0;
    double amp_lower = 0.0;
    double var_e_upper = 0.0;
    double var_e_lower = 0.0;
    double var_gamma_upper = 0.0;
    double var_gamma_lower = 0.0;
    double var_amp_upper = 0.0;
    double var_amp_lower = 0.0;
};

struct PeakTable {
    std::vector<PeakRow> rows;
};

// e_upper >= e_lower, widths > 0, temperatures strictly increasing.
void validate(const PeakTable& table);

struct PeakInit {
    std::vector<Line> lines;
    double background = 0.0;
};

struct FittedPeak {
    double center = 0.0;
    double fwhm = 0.0;
    double area = 0.0;
    double sigma_center = 0.0;
    double sigma_fwhm = 0.0;
    double sigma_area = 0.0;
};

struct PeakFit {
    double temperature = 0.0;
    FitResult result;              // params named center_k, fwhm_k, area_k (k = 1 is highest energy), background
    std::vector<FittedPeak> peaks; // sorted by decreasing energy
    double background = 0.0;
};

struct DoubletFitOptions {
    int n_peaks = 2;
    double initial_fwhm = 0.2;     // meV
    bool include_instrument = true;  // convolve the model with the spectrum's resolution
    LmOptions lm;
};

// Peak finding on a 5-sample moving average: local maxima taken in decreasing
// height, skipping any closer than max(2 steps, initial_fwhm / 2) to one already
// taken. Background starts at the 5th percentile of the raw intensities.
// Throws FitInitError if fewer than n_peaks maxima are found.
PeakInit auto_initialize(const Spectrum& s, int n_peaks, double initial_fwhm);

// Least-squares fit of n_peaks Lorentzians (+ flat background), convolved with the
// instrument response unless disabled. Non-convergence is reported through
// result.converged rather than thrown.
PeakFit fit_doublet(const Spectrum& s, const DoubletFitOptions& options = {},
                    const std::optional<PeakInit>& init = std::nullopt);

// Requires a two-peak fit.
PeakRow to_peak_row(const PeakFit& fit);

// Doublet fit per spectrum. Spectra whose auto-initialization fails (merged
// lines near a crossing) are seeded from the nearest successfully fitted
// temperature. Throws with the offending temperature on failure.
PeakTable build_peak_table(std::span<const Spectrum> series, const DoubletFitOptions& options = {});

// Parameters of the anticrossing model, in order.
const std::vector<std::string>& anticrossing_parameter_names();
// g, qd_e0, qd_alpha, cm_e0, cm_c1
std::vector<std::string> default_free_parameters();

struct AnticrossingOptions {
    std::vector<std::string> free = default_free_parameters();
    std::optional<double> g_initial;  // default: half the smallest row splitting
    bool weighted = false;            // use per-row energy variances as weights
    LmOptions lm;
};

struct AnticrossingFit {
    FitResult result;  // free parameters only
    TuningModel model; // initial model with fitted values substituted
    double g = 0.0;
};

// Joint fit of both branches to the dressed-state energies with E_QD(T), E_C(T)
// from the tuning model. Throws UnderDetermined when 2*rows < 2*free.
AnticrossingFit fit_anticrossing(const PeakTable& table, const TuningModel& initial,
                                 const AnticrossingOptions& options = {});

struct LinewidthRow {
    double temperature = 0.0;
    double predicted_upper = 0.0;
    double predicted_lower = 0.0;
    double measured_upper = 0.0;
    double measured_lower = 0.0;
    double residual_upper() const noexcept { return measured_upper - predicted_upper; }
    double residual_lower() const noexcept { return measured_lower - predicted_lower; }
};

// Branch widths predicted by the weighted-mixing rule along the table's temperatures.
std::vector<LinewidthRow> linewidth_consistency(const PeakTable& table, const TuningModel& model, double g);

} // namespace cqed
