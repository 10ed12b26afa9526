// cqed: command-line front end.
//
// Exit codes
//   0  success
//   1  unexpected internal error
//   2  bad command line, configuration, input value or malformed input file
//   3  I/O error
//   4  fit did not converge or could not be initialized
//   5  fit under-determined (too few data)
//   6  slab waveguide below cutoff (no guided mode)
//
// Results go to stdout or --out files; diagnostics go to stderr.

#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitting.hpp"
#include "cqed/io.hpp"
#include "cqed/kernels.hpp"
#include "cqed/lineshape.hpp"
#include "cqed/model_core.hpp"
#include "cqed/optics.hpp"
#include "cqed/tuning.hpp"
#include "cqed/version.hpp"
#include "cqed/wgm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cqed;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFit = 4;
constexpr int kExitUnderDetermined = 5;
constexpr int kExitCutoff = 6;

std::string build_id() {
    std::string id = std::string("cqed ") + version();
#if defined(__VERSION__)
    id += " (" __VERSION__ ")";
#endif
    id += " kernels=";
    id += kernels::to_string(kernels::active_backend());
    return id;
}

RunConfig load_config(const std::string& path) {
    if (!path.empty()) return RunConfig::load(path);
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return RunConfig::load(env);
    return RunConfig{};
}

std::vector<Spectrum> read_spectra_file(const std::string& path) {
    std::istringstream in(io::read_file(path));
    return io::read_spectra(in);
}

PeakTable read_peak_table_file(const std::string& path) {
    std::istringstream in(io::read_file(path));
    return io::read_peak_table(in);
}

void write_fit_file(const std::string& path, const FitResult& result) {
    std::ostringstream os;
    io::write_fit_result(os, result);
    io::write_file_atomic(path, os.str());
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct SimulateArgs {
    std::string temps;
    std::string out;
    std::optional<double> noise;
    std::optional<std::uint64_t> seed;
};

int run_simulate(const RunConfig& cfg, const SimulateArgs& args) {
    const TuningModel model = cfg.tuning();
    const double g = cfg.coupling();
    const auto temps = args.temps.empty() ? cfg.temperatures() : parse_temperature_list(args.temps);
    const double noise = args.noise.value_or(cfg.real("simulate.noise"));
    const auto seed = args.seed.value_or(static_cast<std::uint64_t>(cfg.integer("simulate.seed")));
    if (!(noise >= 0.0)) throw InvalidInput("--noise must be >= 0");

    std::vector<std::string> warnings;
    auto series = simulate_series(model, g, cfg.emission(), temps, cfg.grid(), cfg.resolution(), &warnings);
    if (noise > 0.0)
        for (std::size_t i = 0; i < series.size(); ++i) series[i] = add_noise(series[i], noise, seed + i);
    print_warnings(warnings);

    std::ostringstream os;
    io::write_spectra(os, series);
    io::write_file_atomic(args.out, os.str());

    double min_split = std::numeric_limits<double>::infinity();
    double t_min = temps.front();
    for (double t : temps) {
        const double s = dressed_energies(system_at(model, g, t)).splitting();
        if (s < min_split) {
            min_split = s;
            t_min = t;
        }
    }
    std::cout << "spectra=" << series.size() << " min_splitting_meV=" << io::format_double(min_split)
              << " at_temperature_K=" << io::format_double(t_min) << '\n';
    return kExitOk;
}

int run_fit_spectrum(const RunConfig& cfg, const std::string& in, std::optional<int> peaks, const std::string& out) {
    const auto spectra = read_spectra_file(in);
    if (spectra.size() != 1)
        throw InvalidInput("expected one spectrum in '" + in + "', found " + std::to_string(spectra.size()));
    DoubletFitOptions options = cfg.doublet_fit();
    if (peaks) {
        if (*peaks != 1 && *peaks != 2) throw InvalidInput("--peaks must be 1 or 2");
        options.n_peaks = *peaks;
    }
    const PeakFit fit = fit_doublet(spectra.front(), options);
    if (!out.empty()) write_fit_file(out, fit.result);

    std::cout << "centers_meV=";
    for (std::size_t k = 0; k < fit.peaks.size(); ++k)
        std::cout << (k ? "," : "") << io::format_double(fit.peaks[k].center);
    std::cout << " fwhm_meV=";
    for (std::size_t k = 0; k < fit.peaks.size(); ++k)
        std::cout << (k ? "," : "") << io::format_double(fit.peaks[k].fwhm);
    if (fit.peaks.size() == 2)
        std::cout << " splitting_meV=" << io::format_double(fit.peaks[0].center - fit.peaks[1].center);
    std::cout << " residual_rms=" << io::format_double(fit.result.residual_rms)
              << " converged=" << (fit.result.converged ? "true" : "false") << '\n';
    if (!fit.result.converged) {
        std::cerr << "error: fit did not converge: " << fit.result.message << '\n';
        return kExitFit;
    }
    return kExitOk;
}

int run_peaks(const RunConfig& cfg, const std::string& in, const std::string& out) {
    const auto spectra = read_spectra_file(in);
    const PeakTable table = build_peak_table(spectra, cfg.doublet_fit());
    std::ostringstream os;
    io::write_peak_table(os, table);
    io::write_file_atomic(out, os.str());

    const auto it = std::min_element(table.rows.begin(), table.rows.end(), [](const PeakRow& a, const PeakRow& b) {
        return a.e_upper - a.e_lower < b.e_upper - b.e_lower;
    });
    std::cout << "rows=" << table.rows.size() << " min_splitting_meV=" << io::format_double(it->e_upper - it->e_lower)
              << " at_temperature_K=" << io::format_double(it->temperature) << '\n';
    return kExitOk;
}

void write_curves(const std::string& path, const PeakTable& table, const TuningModel& model, double g) {
    const double t0 = table.rows.front().temperature;
    const double t1 = table.rows.back().temperature;
    const int n = std::max(2, static_cast<int>((t1 - t0) / 0.1) + 1);
    std::ostringstream os;
    os << "temperature_K,e_upper_meV,e_lower_meV,e_qd_meV,e_cm_meV,fwhm_upper_meV,fwhm_lower_meV\n";
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        const CoupledSystem sys = system_at(model, g, t);
        const DressedEnergies e = dressed_energies(sys);
        const BranchWidths w = branch_linewidths(sys);
        os << io::format_double(t) << ',' << io::format_double(e.upper) << ',' << io::format_double(e.lower) << ','
           << io::format_double(sys.e_qd) << ',' << io::format_double(sys.e_c) << ',' << io::format_double(w.upper)
           << ',' << io::format_double(w.lower) << '\n';
    }
    io::write_file_atomic(path, os.str());
}

int run_fit_anticrossing(const RunConfig& cfg, const std::string& in, const std::string& free, const std::string& out,
                         const std::string& curves) {
    const PeakTable table = read_peak_table_file(in);
    AnticrossingOptions options = cfg.anticrossing();
    if (!free.empty()) options.free = split_list(free);
    const AnticrossingFit fit = fit_anticrossing(table, cfg.tuning(), options);
    if (!out.empty()) write_fit_file(out, fit.result);
    if (!curves.empty()) write_curves(curves, table, fit.model, fit.g);

    const auto gi = std::find(options.free.begin(), options.free.end(), "g");
    std::cout << "g_meV=" << io::format_double(fit.g);
    if (gi != options.free.end()) std::cout << " ± " << io::format_double(fit.result.sigma("g"));
    std::cout << " min_splitting_meV=" << io::format_double(2.0 * fit.g)
              << " residual_rms=" << io::format_double(fit.result.residual_rms)
              << " converged=" << (fit.result.converged ? "true" : "false") << '\n';
    if (!fit.result.converged) {
        std::cerr << "error: fit did not converge: " << fit.result.message << '\n';
        return kExitFit;
    }
    return kExitOk;
}

struct ExtractArgs {
    double g = 0.0;
    std::optional<double> energy, n_eff, eps_r, volume_factor, position_factor;
};

int run_extract_f(const RunConfig& cfg, const ExtractArgs& a) {
    if (!(a.g > 0.0)) throw InvalidInput("--g must be > 0");
    CavityOptics optics = cfg.optics();
    if (a.energy) optics.emission_energy = *a.energy;
    if (a.n_eff) {
        optics.n_eff = *a.n_eff;
        if (cfg.is_auto("optics.eps_r")) optics.eps_r = *a.n_eff * *a.n_eff;
    }
    if (a.eps_r) optics.eps_r = *a.eps_r;
    if (a.volume_factor) optics.mode_volume_factor = *a.volume_factor;
    if (a.position_factor) optics.position_factor = *a.position_factor;
    validate(optics);
    const PhysicalConstants c = cfg.constants();
    const double f = f_from_coupling(a.g, optics, c);
    const double volume = mode_volume(optics, c);
    std::cout << "f=" << io::format_double(f)
              << " wavelength_nm=" << io::format_double(wavelength_from_energy(optics.emission_energy, c))
              << " mode_volume_um3=" << io::format_double(volume * 1e18) << '\n';
    return kExitOk;
}

struct WgmArgs {
    std::optional<double> diameter, thickness, index;
    std::string window;
};

int run_wgm(const RunConfig& cfg, const WgmArgs& a) {
    DiskGeometry geom = cfg.disk();
    if (a.diameter) geom.diameter_um = *a.diameter;
    if (a.thickness) geom.thickness_nm = *a.thickness;
    if (a.index) geom.core.n0 = *a.index;
    validate(geom);
    const auto [e_min, e_max] = a.window.empty() ? cfg.wgm_window() : parse_range(a.window);
    const auto modes = find_modes(geom, e_min, e_max);
    std::cout << "# closed-boundary effective-index model; positions uncertain by a fraction of the FSR\n";
    io::write_mode_table(std::cout, modes);
    std::cout << "# modes=" << modes.size() << '\n';
    return kExitOk;
}

int run_classify(double g, double gamma_qd, double gamma_cm) {
    CoupledSystem sys;
    sys.e_qd = sys.e_c = 1.0;
    sys.g = g;
    sys.gamma_qd = gamma_qd;
    sys.gamma_cm = gamma_cm;
    const RegimeReport r = classify_regime(sys);
    std::cout << "regime=" << to_string(r.regime) << " ratio=" << io::format_double(r.resolvability_ratio)
              << " splitting_meV=" << io::format_double(r.splitting_at_resonance) << '\n';
    return kExitOk;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const FitInitError*>(&e)) return kExitFit;
    if (dynamic_cast<const UnderDetermined*>(&e)) return kExitUnderDetermined;
    if (dynamic_cast<const SlabCutoff*>(&e)) return kExitCutoff;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidInput*>(&e) ||
        dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DegenerateCoupling*>(&e) ||
        dynamic_cast<const NoSignChange*>(&e))
        return kExitUsage;
    return kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-QED strong-coupling toolkit: dressed states, spectra, fits, oscillator strength, microdisk modes"};
    app.set_version_flag("--version", build_id);
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "configuration file (default: $" + std::string(kConfigEnvVar) + ")")
        ->check(CLI::ExistingFile);
    app.fallthrough();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "synthesize a temperature series of doublet spectra");
    simulate->add_option("--temps", sim.temps, "T, T1,T2,... or start:stop:step (K)");
    simulate->add_option("--out", sim.out, "spectrum CSV to write")->required();
    simulate->add_option("--noise", sim.noise, "Gaussian noise sigma (counts)");
    simulate->add_option("--seed", sim.seed, "noise seed");

    std::string fit_in, fit_out;
    std::optional<int> fit_peaks;
    auto* fit_spectrum = app.add_subcommand("fit-spectrum", "fit Lorentzian peaks to one spectrum");
    fit_spectrum->add_option("--in", fit_in, "spectrum CSV")->required();
    fit_spectrum->add_option("--peaks", fit_peaks, "number of peaks (1 or 2)");
    fit_spectrum->add_option("--out", fit_out, "fit result document");

    std::string peaks_in, peaks_out;
    auto* peaks = app.add_subcommand("peaks", "fit every spectrum of a series and write the peak table");
    peaks->add_option("--in", peaks_in, "spectrum CSV")->required();
    peaks->add_option("--out", peaks_out, "peak table CSV")->required();

    std::string ac_in, ac_free, ac_out, ac_curves;
    auto* anticrossing = app.add_subcommand("fit-anticrossing", "fit g and tuning coefficients to a peak table");
    anticrossing->add_option("--in", ac_in, "peak table CSV")->required();
    anticrossing->add_option("--free", ac_free, "comma-separated free parameters");
    anticrossing->add_option("--out", ac_out, "fit result document");
    anticrossing->add_option("--curves", ac_curves, "CSV of fitted branch curves for plotting");

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract-f", "oscillator strength from the coupling constant");
    extract->add_option("--g", ex.g, "coupling constant (meV)")->required();
    extract->add_option("--energy", ex.energy, "emission energy (meV)");
    extract->add_option("--n-eff", ex.n_eff, "effective index");
    extract->add_option("--eps-r", ex.eps_r, "relative permittivity (default n_eff^2)");
    extract->add_option("--volume-factor", ex.volume_factor, "mode volume in (lambda/n)^3");
    extract->add_option("--position-factor", ex.position_factor, "spatial-mismatch factor in (0, 1]");

    WgmArgs wg;
    auto* wgm = app.add_subcommand("wgm", "whispering-gallery modes of a microdisk");
    wgm->add_option("--diameter", wg.diameter, "disk diameter (um)");
    wgm->add_option("--thickness", wg.thickness, "disk thickness (nm)");
    wgm->add_option("--window", wg.window, "energy window e_min:e_max (meV)");
    wgm->add_option("--index", wg.index, "core refractive index");

    double cl_g = 0.0, cl_gqd = 0.0, cl_gcm = 0.0;
    auto* classify = app.add_subcommand("classify", "strong or weak coupling");
    classify->add_option("--g", cl_g, "coupling constant (meV)")->required();
    classify->add_option("--gamma-qd", cl_gqd, "exciton FWHM (meV)")->required();
    classify->add_option("--gamma-cm", cl_gcm, "cavity-mode FWHM (meV)")->required();

    auto* config = app.add_subcommand("config", "print every configuration key with its effective value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig cfg = load_config(config_path);
        if (config->parsed()) {
            cfg.write(std::cout);
            return kExitOk;
        }
        if (classify->parsed()) return run_classify(cl_g, cl_gqd, cl_gcm);
        if (simulate->parsed()) return run_simulate(cfg, sim);
        if (fit_spectrum->parsed()) return run_fit_spectrum(cfg, fit_in, fit_peaks, fit_out);
        if (peaks->parsed()) return run_peaks(cfg, peaks_in, peaks_out);
        if (anticrossing->parsed()) return run_fit_anticrossing(cfg, ac_in, ac_free, ac_out, ac_curves);
        if (extract->parsed()) return run_extract_f(cfg, ex);
        if (wgm->parsed()) return run_wgm(cfg, wg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitInternal;
}
