#include "cqed/fitting.hpp"

#include "cqed/errors.hpp"
#include "cqed/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cqed {

void validate(const PeakTable& table) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const PeakRow& r = table.rows[i];
        const double vals[] = {r.temperature, r.e_upper, r.e_lower, r.gamma_upper, r.gamma_lower, r.amp_upper,
                               r.amp_lower};
        for (double v : vals)
            if (!std::isfinite(v)) throw InvalidInput("peak table row " + std::to_string(i + 1) + ": non-finite value");
        if (r.e_upper < r.e_lower)
            throw InvalidInput("peak table row " + std::to_string(i + 1) + ": e_upper < e_lower");
        if (r.gamma_upper <= 0.0 || r.gamma_lower <= 0.0)
            throw InvalidInput("peak table row " + std::to_string(i + 1) + ": widths must be positive");
        if (i > 0 && !(r.temperature > table.rows[i - 1].temperature))
            throw InvalidInput("peak table: temperatures must be strictly increasing");
    }
}

PeakInit auto_initialize(const Spectrum& s, int n_peaks, double initial_fwhm) {
    validate(s);
    if (n_peaks < 1 || n_peaks > 2) throw InvalidInput("auto_initialize: n_peaks must be 1 or 2");
    if (!(initial_fwhm > 0.0)) throw InvalidInput("auto_initialize: initial fwhm must be positive");
    const double step = grid_step(s.energies);
    const auto& y = s.intensities;
    const std::size_t n = y.size();

    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, i + 2);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += y[j];
        smooth[i] = acc / static_cast<double>(hi - lo + 1);
    }

    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1]) maxima.push_back(i);
    std::stable_sort(maxima.begin(), maxima.end(),
                     [&](std::size_t a, std::size_t b) { return smooth[a] > smooth[b]; });

    const double min_separation = std::max(2.0 * step, 0.5 * initial_fwhm);
    std::vector<std::size_t> chosen;
    for (std::size_t idx : maxima) {
        const bool far = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
            return std::abs(s.energies[idx] - s.energies[c]) >= min_separation - 1e-9 * step;
        });
        if (far) chosen.push_back(idx);
        if (static_cast<int>(chosen.size()) == n_peaks) break;
    }
    if (static_cast<int>(chosen.size()) < n_peaks) {
        std::ostringstream msg;
        msg << "found " << chosen.size() << " spectral maxima, need " << n_peaks << " (T = " << s.temperature
            << " K)";
        throw FitInitError(msg.str());
    }

    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    PeakInit init;
    init.background = sorted[static_cast<std::size_t>(0.05 * static_cast<double>(n - 1))];
    for (std::size_t idx : chosen) {
        const double height = std::max(smooth[idx] - init.background, 1e-12);
        init.lines.push_back({s.energies[idx], initial_fwhm, height * std::numbers::pi * 0.5 * initial_fwhm});
    }
    return init;
}

PeakFit fit_doublet(const Spectrum& s, const DoubletFitOptions& options, const std::optional<PeakInit>& init) {
    validate(s);
    const int n_peaks = options.n_peaks;
    if (n_peaks < 1 || n_peaks > 2) throw InvalidInput("fit_doublet: n_peaks must be 1 or 2");
    const PeakInit start = init ? *init : auto_initialize(s, n_peaks, options.initial_fwhm);
    if (static_cast<int>(start.lines.size()) != n_peaks)
        throw InvalidInput("fit_doublet: initial guess has the wrong number of peaks");

    const double step = grid_step(s.energies);
    const double e_lo = s.energies.front();
    const double e_hi = s.energies.back();
    const bool convolve = options.include_instrument && s.resolution_fwhm > 0.0;
    const auto kernel = convolve ? instrument_kernel(s.resolution_fwhm, step) : std::vector<double>{1.0};

    // Centers are optimized as offsets from the middle of the window so the
    // finite-difference steps scale with the line widths, not with ~1.6 eV.
    const double e_ref = 0.5 * (e_lo + e_hi);
    const auto n_params = static_cast<std::size_t>(3 * n_peaks + 1);
    std::vector<double> p0;
    Bounds bounds;
    for (const Line& l : start.lines) {
        p0.insert(p0.end(), {std::clamp(l.center, e_lo, e_hi) - e_ref, l.fwhm, std::max(l.area, 0.0)});
        bounds.lower.insert(bounds.lower.end(), {e_lo - e_ref, 0.25 * step, 0.0});
        bounds.upper.insert(bounds.upper.end(),
                            {e_hi - e_ref, e_hi - e_lo, std::numeric_limits<double>::infinity()});
    }
    p0.push_back(start.background);
    bounds.lower.push_back(-std::numeric_limits<double>::infinity());
    bounds.upper.push_back(std::numeric_limits<double>::infinity());

    const std::span<const double> energies(s.energies);
    const std::span<const double> data(s.intensities);
    ResidualFn residual = [&, n_peaks](std::span<const double> p, std::span<double> r) {
        std::vector<double> raw(energies.size(), 0.0);
        for (int k = 0; k < n_peaks; ++k) {
            const auto b = static_cast<std::size_t>(3 * k);
            kernels::accumulate_lorentzian(energies, e_ref + p[b], p[b + 1], p[b + 2], raw);
        }
        if (kernel.size() > 1) {
            kernels::convolve_clamped(raw, kernel, r);
        } else {
            std::copy(raw.begin(), raw.end(), r.begin());
        }
        const double bg = p[n_params - 1];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += bg - data[i];
    };

    FitResult raw_fit = lm_minimize(residual, s.intensities.size(), p0, bounds, options.lm);
    for (int k = 0; k < n_peaks; ++k) raw_fit.params[static_cast<std::size_t>(3 * k)] += e_ref;

    std::vector<int> order(static_cast<std::size_t>(n_peaks));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return raw_fit.params[3 * a] > raw_fit.params[3 * b]; });

    PeakFit out;
    out.temperature = s.temperature;
    out.result = raw_fit;
    out.result.params.clear();
    out.result.sigmas.clear();
    out.result.names.clear();
    out.result.units.clear();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto b = static_cast<std::size_t>(3 * order[k]);
        const std::string tag = std::to_string(k + 1);
        FittedPeak peak{raw_fit.params[b],     raw_fit.params[b + 1], raw_fit.params[b + 2],
                        raw_fit.sigmas[b],     raw_fit.sigmas[b + 1], raw_fit.sigmas[b + 2]};
        out.peaks.push_back(peak);
        const char* names[] = {"center_", "fwhm_", "area_"};
        const char* units[] = {"meV", "meV", "counts*meV"};
        for (std::size_t j = 0; j < 3; ++j) {
            out.result.names.push_back(names[j] + tag);
            out.result.units.push_back(units[j]);
            out.result.params.push_back(raw_fit.params[b + j]);
            out.result.sigmas.push_back(raw_fit.sigmas[b + j]);
        }
    }
    out.background = raw_fit.params[n_params - 1];
    out.result.names.push_back("background");
    out.result.units.push_back("counts");
    out.result.params.push_back(out.background);
    out.result.sigmas.push_back(raw_fit.sigmas[n_params - 1]);
    return out;
}

PeakRow to_peak_row(const PeakFit& fit) {
    if (fit.peaks.size() != 2) throw InvalidInput("peak row needs a two-peak fit");
    const FittedPeak& u = fit.peaks[0];
    const FittedPeak& l = fit.peaks[1];
    PeakRow row;
    row.temperature = fit.temperature;
    row.e_upper = u.center;
    row.e_lower = l.center;
    row.gamma_upper = u.fwhm;
    row.gamma_lower = l.fwhm;
    row.amp_upper = u.area;
    row.amp_lower = l.area;
    row.var_e_upper = u.sigma_center * u.sigma_center;
    row.var_e_lower = l.sigma_center * l.sigma_center;
    row.var_gamma_upper = u.sigma_fwhm * u.sigma_fwhm;
    row.var_gamma_lower = l.sigma_fwhm * l.sigma_fwhm;
    row.var_amp_upper = u.sigma_area * u.sigma_area;
    row.var_amp_lower = l.sigma_area * l.sigma_area;
    return row;
}

PeakTable build_peak_table(std::span<const Spectrum> series, const DoubletFitOptions& options) {
    if (series.size() < 3) throw InvalidInput("build_peak_table: need at least 3 temperatures");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].temperature > series[i - 1].temperature))
            throw InvalidInput("build_peak_table: temperatures must be strictly increasing");
    DoubletFitOptions two = options;
    two.n_peaks = 2;

    const std::size_t n = series.size();
    std::vector<std::optional<PeakFit>> fits(n);
    std::vector<std::string> init_errors(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            fits[i] = fit_doublet(series[i], two);
        } catch (const FitInitError& e) {
            init_errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (fits[i]) continue;
        std::optional<std::size_t> seed;
        for (std::size_t d = 1; d < n && !seed; ++d) {
            if (i >= d && fits[i - d]) seed = i - d;
            else if (i + d < n && fits[i + d]) seed = i + d;
        }
        if (!seed) throw FitInitError(init_errors[i]);
        PeakInit init;
        init.background = fits[*seed]->background;
        for (const FittedPeak& p : fits[*seed]->peaks) init.lines.push_back({p.center, p.fwhm, p.area});
        fits[i] = fit_doublet(series[i], two, init);
    }

    PeakTable table;
    for (std::size_t i = 0; i < n; ++i) {
        if (!fits[i]->result.converged) {
            std::ostringstream msg;
            msg << "doublet fit did not converge at T = " << series[i].temperature << " K: "
                << fits[i]->result.message;
            throw NonConvergence(msg.str());
        }
        table.rows.push_back(to_peak_row(*fits[i]));
    }
    return table;
}

const std::vector<std::string>& anticrossing_parameter_names() {
    static const std::vector<std::string> names = {"g", "qd_e0", "qd_alpha", "qd_beta", "cm_e0", "cm_c1", "cm_c2"};
    return names;
}

std::vector<std::string> default_free_parameters() {
    return {"g", "qd_e0", "qd_alpha", "cm_e0", "cm_c1"};
}

namespace {

struct AnticrossingParam {
    const char* name;
    const char* unit;
    double TuningModel::* field;  // nullptr for g
    double lower;
    bool offset;  // optimized relative to its initial value (large absolute energies)
};

const AnticrossingParam kParams[] = {
    {"g", "meV", nullptr, 0.0, false},
    {"qd_e0", "meV", &TuningModel::qd_e0, 0.0, true},
    {"qd_alpha", "meV/K", &TuningModel::qd_alpha, 0.0, false},
    {"qd_beta", "K", &TuningModel::qd_beta, 1e-6, false},
    {"cm_e0", "meV", &TuningModel::cm_e0, 0.0, true},
    {"cm_c1", "meV/K", &TuningModel::cm_c1, 0.0, false},
    {"cm_c2", "meV/K^2", &TuningModel::cm_c2, 0.0, false},
};

const AnticrossingParam& lookup(const std::string& name) {
    for (const auto& p : kParams)
        if (name == p.name) return p;
    throw InvalidInput("unknown anticrossing parameter '" + name + "'");
}

} // namespace

AnticrossingFit fit_anticrossing(const PeakTable& table, const TuningModel& initial,
                                 const AnticrossingOptions& options) {
    validate(table);
    validate(initial);
    if (options.free.empty()) throw InvalidInput("fit_anticrossing: no free parameters");
    std::vector<const AnticrossingParam*> free;
    for (const auto& name : options.free) {
        const AnticrossingParam* p = &lookup(name);
        if (std::find(free.begin(), free.end(), p) != free.end())
            throw InvalidInput("fit_anticrossing: parameter '" + name + "' listed twice");
        free.push_back(p);
    }
    const std::size_t n_data = 2 * table.rows.size();
    if (n_data < 2 * free.size()) {
        throw UnderDetermined("anticrossing fit has " + std::to_string(n_data) + " data values for " +
                              std::to_string(free.size()) + " free parameters (need at least " +
                              std::to_string(2 * free.size()) + ")");
    }
    if (options.weighted) {
        for (const auto& r : table.rows)
            if (!(r.var_e_upper > 0.0) || !(r.var_e_lower > 0.0))
                throw InvalidInput("weighted anticrossing fit needs positive energy variances on every row");
    }

    double g0 = 0.0;
    if (options.g_initial) {
        g0 = *options.g_initial;
    } else {
        double min_split = std::numeric_limits<double>::infinity();
        for (const auto& r : table.rows) min_split = std::min(min_split, r.e_upper - r.e_lower);
        g0 = 0.5 * min_split;
    }
    g0 = std::max(g0, 1e-3);

    std::vector<double> origin(free.size(), 0.0);
    for (std::size_t i = 0; i < free.size(); ++i)
        if (free[i]->offset) origin[i] = initial.*(free[i]->field);

    auto apply = [&](std::span<const double> p, TuningModel& m, double& g) {
        m = initial;
        g = g0;
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (free[i]->field == nullptr) g = p[i];
            else m.*(free[i]->field) = origin[i] + p[i];
        }
    };

    std::vector<double> p0;
    Bounds bounds;
    for (std::size_t i = 0; i < free.size(); ++i) {
        const auto* f = free[i];
        p0.push_back(f->field == nullptr ? g0 : initial.*(f->field) - origin[i]);
        bounds.lower.push_back(f->lower - origin[i]);
        bounds.upper.push_back(std::numeric_limits<double>::infinity());
    }

    // Residuals are formed relative to a reference energy near the data so that
    // no ~1.6 eV quantity is rounded before the sub-meV differences are taken.
    const double ref = initial.cm_e0;
    std::size_t qd_slot = free.size(), cm_slot = free.size();
    for (std::size_t i = 0; i < free.size(); ++i) {
        if (free[i]->field == &TuningModel::qd_e0) qd_slot = i;
        if (free[i]->field == &TuningModel::cm_e0) cm_slot = i;
    }
    const auto& rows = table.rows;
    std::vector<double> du(rows.size()), dl(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        du[i] = rows[i].e_upper - ref;
        dl[i] = rows[i].e_lower - ref;
    }
    const bool weighted = options.weighted;
    ResidualFn residual = [&](std::span<const double> p, std::span<double> r) {
        TuningModel m;
        double g = 0.0;
        apply(p, m, g);
        const double qd0 = (initial.qd_e0 - ref) + (qd_slot < free.size() ? p[qd_slot] : 0.0);
        const double cm0 = cm_slot < free.size() ? p[cm_slot] : 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double t = rows[i].temperature;
            const double eq = qd0 + qd_shift(m, t);
            const double ec = cm0 + cm_shift(m, t);
            const double mean = 0.5 * (eq + ec);
            const double half = 0.5 * std::hypot(eq - ec, 2.0 * g);
            double ru = mean + half - du[i];
            double rl = mean - half - dl[i];
            if (weighted) {
                ru /= std::sqrt(rows[i].var_e_upper);
                rl /= std::sqrt(rows[i].var_e_lower);
            }
            r[2 * i] = ru;
            r[2 * i + 1] = rl;
        }
    };

    AnticrossingFit out;
    out.result = lm_minimize(residual, n_data, p0, bounds, options.lm);
    for (std::size_t i = 0; i < free.size(); ++i) {
        out.result.names[i] = free[i]->name;
        out.result.units[i] = free[i]->unit;
    }
    apply(out.result.params, out.model, out.g);
    for (std::size_t i = 0; i < free.size(); ++i) out.result.params[i] += origin[i];
    return out;
}

std::vector<LinewidthRow> linewidth_consistency(const PeakTable& table, const TuningModel& model, double g) {
    validate(table);
    validate(model);
    std::vector<LinewidthRow> out;
    for (const auto& r : table.rows) {
        const CoupledSystem sys = system_at(model, g, r.temperature);
        LinewidthRow row;
        row.temperature = r.temperature;
        if (sys.g == 0.0 && sys.detuning() == 0.0) {
            row.predicted_upper = row.predicted_lower = 0.5 * (sys.gamma_qd + sys.gamma_cm);
        } else {
            const auto w = branch_linewidths(sys);
            row.predicted_upper = w.upper;
            row.predicted_lower = w.lower;
        }
        row.measured_upper = r.gamma_upper;
        row.measured_lower = r.gamma_lower;
        out.push_back(row);
    }
    return out;
}

} // namespace cqed
