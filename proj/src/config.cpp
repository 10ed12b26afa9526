#include "cqed/config.hpp"

#include "cqed/errors.hpp"
#include "cqed/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace cqed {

namespace {

const std::vector<KeySpec> kKeys = {
    {"tuning.qd_e0", KeyType::real, "1662.48", "QD exciton energy at 0 K (meV)"},
    {"tuning.qd_alpha", KeyType::real, "0.5405", "Varshni alpha of the QD line (meV/K)"},
    {"tuning.qd_beta", KeyType::real, "204", "Varshni beta of the QD line (K)"},
    {"tuning.cm_e0", KeyType::real, "1661", "cavity-mode energy at 0 K (meV)"},
    {"tuning.cm_c1", KeyType::real, "0.005", "linear mode redshift (meV/K)"},
    {"tuning.cm_c2", KeyType::real, "0.0005", "quadratic mode redshift (meV/K^2)"},
    {"tuning.gamma_qd_0", KeyType::real, "0.08", "QD FWHM at 0 K (meV)"},
    {"tuning.gamma_qd_slope", KeyType::real, "0.004", "linear QD thermal broadening (meV/K)"},
    {"tuning.gamma_qd_act", KeyType::real, "0", "activated QD broadening amplitude (meV), 0 = off"},
    {"tuning.act_energy", KeyType::real, "10", "activation energy of the activated term (meV)"},
    {"tuning.gamma_cm", KeyType::real, "0.2", "cavity-mode FWHM (meV)"},
    {"coupling.g", KeyType::real, "0.2", "coupling constant g, half the vacuum Rabi splitting (meV)"},
    {"emission.eta_x", KeyType::real, "1", "exciton-channel detection efficiency"},
    {"emission.eta_c", KeyType::real, "0.5", "photon-channel detection efficiency"},
    {"emission.background", KeyType::real, "0", "flat background (counts)"},
    {"grid.step", KeyType::real, "0.01", "energy grid spacing (meV)"},
    {"grid.half_width", KeyType::real, "3", "half width of the energy window (meV)"},
    {"grid.center", KeyType::real_or_auto, "auto", "window center (meV); auto = mean bare energy per temperature"},
    {"instrument.resolution", KeyType::real, "0.08", "Gaussian instrument FWHM (meV), 0 = none"},
    {"simulate.temps", KeyType::text, "4:44:2", "temperatures: T, T1,T2,... or start:stop:step (K)"},
    {"simulate.noise", KeyType::real, "0", "Gaussian noise sigma added to each sample (counts)"},
    {"simulate.seed", KeyType::integer, "1", "noise seed (spectrum i uses seed + i)"},
    {"fit.peaks", KeyType::integer, "2", "Lorentzians per spectrum fit (1 or 2)"},
    {"fit.initial_fwhm", KeyType::real, "0.2", "initial FWHM of auto-initialized peaks (meV)"},
    {"fit.free", KeyType::text, "g,qd_e0,qd_alpha,cm_e0,cm_c1",
     "free anticrossing parameters (g,qd_e0,qd_alpha,qd_beta,cm_e0,cm_c1,cm_c2)"},
    {"fit.max_iterations", KeyType::integer, "500", "Levenberg-Marquardt iteration limit"},
    {"fit.ftol", KeyType::real, "1e-10", "relative cost-change tolerance"},
    {"fit.gtol", KeyType::real, "1e-8", "gradient infinity-norm tolerance"},
    {"optics.energy", KeyType::real, "1661", "emission energy for mode volume and f (meV)"},
    {"optics.n_eff", KeyType::real, "3.2", "effective refractive index"},
    {"optics.eps_r", KeyType::real_or_auto, "auto", "relative permittivity; auto = n_eff^2"},
    {"optics.volume_factor", KeyType::real, "6", "mode volume in units of (lambda/n)^3"},
    {"optics.position_factor", KeyType::real, "1", "spatial-mismatch reduction of g, in (0, 1]"},
    {"constants.vacuum_permittivity", KeyType::real, "8.8541878128e-12", "F/m"},
    {"constants.electron_mass", KeyType::real, "9.1093837015e-31", "kg"},
    {"constants.elementary_charge", KeyType::real, "1.602176634e-19", "C"},
    {"constants.reduced_planck", KeyType::real, "1.054571817e-34", "J s"},
    {"constants.hc", KeyType::real, "1239.841984", "eV nm"},
    {"disk.diameter", KeyType::real, "2", "microdisk diameter (um)"},
    {"disk.thickness", KeyType::real, "250", "microdisk thickness (nm)"},
    {"disk.index", KeyType::real, "3.5", "core refractive index at disk.lambda0"},
    {"disk.dn_dlambda", KeyType::real, "0", "linear core-index dispersion (1/nm)"},
    {"disk.lambda0", KeyType::real, "750", "reference wavelength of the index model (nm)"},
    {"disk.clad_index", KeyType::real, "1", "cladding index (air = 1)"},
    {"wgm.window", KeyType::text, "1653.5:1668.5", "mode-search window e_min:e_max (meV)"},
};

const KeySpec* find_key(std::string_view key) {
    for (const auto& k : kKeys)
        if (k.key == key) return &k;
    return nullptr;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void check_value(const KeySpec& spec, std::string_view value) {
    auto bad = [&](const char* what) {
        throw ConfigError("key '" + std::string(spec.key) + "': " + what + ", got '" + std::string(value) + "'");
    };
    switch (spec.type) {
    case KeyType::real_or_auto:
        if (value == "auto") return;
        [[fallthrough]];
    case KeyType::real: {
        try {
            if (!std::isfinite(io::parse_double(value))) bad("expected a finite number");
        } catch (const InvalidInput&) {
            bad("expected a number");
        }
        return;
    }
    case KeyType::integer: {
        std::int64_t v = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) bad("expected an integer");
        return;
    }
    case KeyType::text:
        if (value.empty()) bad("expected a non-empty value");
        return;
    }
}

} // namespace

RunConfig::RunConfig() {
    for (const auto& k : kKeys) values_.emplace(std::string(k.key), std::string(k.default_value));
}

const std::vector<KeySpec>& RunConfig::keys() { return kKeys; }

void RunConfig::set(std::string_view key, std::string_view value) {
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
    value = trim(value);
    check_value(*spec, value);
    values_[std::string(key)] = std::string(value);
}

RunConfig RunConfig::parse(std::istream& is, std::string_view source) {
    RunConfig cfg;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
        try {
            cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    return parse(in, path.string());
}

const std::string& RunConfig::raw(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    return it->second;
}

double RunConfig::real(std::string_view key) const {
    const std::string& v = raw(key);
    if (v == "auto") throw ConfigError("key '" + std::string(key) + "' is auto");
    return io::parse_double(v);
}

std::int64_t RunConfig::integer(std::string_view key) const {
    const std::string& v = raw(key);
    std::int64_t out = 0;
    std::from_chars(v.data(), v.data() + v.size(), out);
    return out;
}

bool RunConfig::is_auto(std::string_view key) const { return raw(key) == "auto"; }

TuningModel RunConfig::tuning() const {
    TuningModel m;
    m.qd_e0 = real("tuning.qd_e0");
    m.qd_alpha = real("tuning.qd_alpha");
    m.qd_beta = real("tuning.qd_beta");
    m.cm_e0 = real("tuning.cm_e0");
    m.cm_c1 = real("tuning.cm_c1");
    m.cm_c2 = real("tuning.cm_c2");
    m.gamma_qd_0 = real("tuning.gamma_qd_0");
    m.gamma_qd_slope = real("tuning.gamma_qd_slope");
    m.gamma_qd_act = real("tuning.gamma_qd_act");
    m.act_energy = real("tuning.act_energy");
    m.gamma_cm = real("tuning.gamma_cm");
    validate(m);
    return m;
}

EmissionModel RunConfig::emission() const {
    EmissionModel em{real("emission.eta_x"), real("emission.eta_c"), real("emission.background")};
    validate(em);
    return em;
}

GridSpec RunConfig::grid() const {
    GridSpec g;
    g.step = real("grid.step");
    g.half_width = real("grid.half_width");
    if (!is_auto("grid.center")) g.center = real("grid.center");
    return g;
}

std::vector<double> RunConfig::temperatures() const { return parse_temperature_list(raw("simulate.temps")); }

LmOptions RunConfig::lm() const {
    LmOptions o;
    o.max_iterations = static_cast<int>(integer("fit.max_iterations"));
    o.ftol = real("fit.ftol");
    o.gtol = real("fit.gtol");
    if (o.max_iterations < 1) throw ConfigError("fit.max_iterations must be >= 1");
    return o;
}

DoubletFitOptions RunConfig::doublet_fit() const {
    DoubletFitOptions o;
    o.n_peaks = static_cast<int>(integer("fit.peaks"));
    o.initial_fwhm = real("fit.initial_fwhm");
    o.lm = lm();
    if (o.n_peaks != 1 && o.n_peaks != 2) throw ConfigError("fit.peaks must be 1 or 2");
    return o;
}

AnticrossingOptions RunConfig::anticrossing() const {
    AnticrossingOptions o;
    o.free = split_list(raw("fit.free"));
    o.lm = lm();
    return o;
}

CavityOptics RunConfig::optics() const {
    CavityOptics o = CavityOptics::with_index(real("optics.energy"), real("optics.n_eff"),
                                              real("optics.volume_factor"));
    if (!is_auto("optics.eps_r")) o.eps_r = real("optics.eps_r");
    o.position_factor = real("optics.position_factor");
    validate(o);
    return o;
}

PhysicalConstants RunConfig::constants() const {
    PhysicalConstants c;
    c.vacuum_permittivity = real("constants.vacuum_permittivity");
    c.electron_mass = real("constants.electron_mass");
    c.elementary_charge = real("constants.elementary_charge");
    c.reduced_planck = real("constants.reduced_planck");
    c.hc_ev_nm = real("constants.hc");
    return c;
}

DiskGeometry RunConfig::disk() const {
    DiskGeometry g;
    g.diameter_um = real("disk.diameter");
    g.thickness_nm = real("disk.thickness");
    g.core.n0 = real("disk.index");
    g.core.dn_dlambda = real("disk.dn_dlambda");
    g.core.lambda0_nm = real("disk.lambda0");
    g.clad_index = real("disk.clad_index");
    return g;
}

std::pair<double, double> RunConfig::wgm_window() const { return parse_range(raw("wgm.window")); }

void RunConfig::write(std::ostream& os) const {
    for (const auto& k : kKeys) os << "# " << k.doc << '\n' << k.key << " = " << raw(k.key) << "\n\n";
}

void RunConfig::write_defaults(std::ostream& os) { RunConfig{}.write(os); }

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.emplace_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::pair<double, double> parse_range(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || text.find(':', colon + 1) != std::string_view::npos)
        throw ConfigError("expected 'a:b', got '" + std::string(text) + "'");
    try {
        return {io::parse_double(text.substr(0, colon)), io::parse_double(text.substr(colon + 1))};
    } catch (const InvalidInput&) {
        throw ConfigError("expected 'a:b' with numbers, got '" + std::string(text) + "'");
    }
}

std::vector<double> parse_temperature_list(std::string_view text) {
    text = trim(text);
    std::vector<double> temps;
    try {
        if (text.find(':') != std::string_view::npos) {
            const auto parts = [&] {
                std::vector<std::string_view> p;
                std::size_t start = 0;
                while (true) {
                    const auto pos = text.find(':', start);
                    p.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
                    if (pos == std::string_view::npos) break;
                    start = pos + 1;
                }
                return p;
            }();
            if (parts.size() != 3) throw ConfigError("temperature range must be start:stop:step");
            const double start = io::parse_double(parts[0]);
            const double stop = io::parse_double(parts[1]);
            const double step = io::parse_double(parts[2]);
            if (!(step > 0.0) || stop < start) throw ConfigError("temperature range needs step > 0 and stop >= start");
            const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
            for (long i = 0; i <= n; ++i) temps.push_back(start + static_cast<double>(i) * step);
        } else {
            for (const auto& item : split_list(text)) temps.push_back(io::parse_double(item));
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("temperature list: ") + e.what());
    }
    if (temps.empty()) throw ConfigError("empty temperature list");
    for (double t : temps)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be finite and >= 0 K");
    return temps;
}

} // namespace cqed
