#include "cqed/optics.hpp"

#include "cqed/errors.hpp"

#include <cmath>

namespace cqed {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive and finite");
}

} // namespace

CavityOptics CavityOptics::with_index(double emission_energy, double n_eff, double mode_volume_factor) {
    CavityOptics o;
    o.emission_energy = emission_energy;
    o.n_eff = n_eff;
    o.eps_r = n_eff * n_eff;
    o.mode_volume_factor = mode_volume_factor;
    return o;
}

void validate(const CavityOptics& o) {
    require_positive(o.emission_energy, "emission energy");
    if (!(o.n_eff >= 1.0 && o.n_eff <= 4.0)) throw InvalidInput("n_eff must lie in [1, 4]");
    if (!(o.eps_r > 1.0) || !std::isfinite(o.eps_r)) throw InvalidInput("eps_r must exceed 1");
    require_positive(o.mode_volume_factor, "mode volume factor");
    if (!(o.position_factor > 0.0 && o.position_factor <= 1.0))
        throw InvalidInput("position factor must lie in (0, 1]");
}

double wavelength_from_energy(double energy_mev, const PhysicalConstants& c) {
    require_positive(energy_mev, "energy");
    return c.hc_ev_nm * 1e3 / energy_mev;
}

double energy_from_wavelength(double lambda_nm, const PhysicalConstants& c) {
    require_positive(lambda_nm, "wavelength");
    return c.hc_ev_nm * 1e3 / lambda_nm;
}

double mode_volume(const CavityOptics& o, const PhysicalConstants& c) {
    validate(o);
    const double reduced_m = wavelength_from_energy(o.emission_energy, c) * 1e-9 / o.n_eff;
    return o.mode_volume_factor * reduced_m * reduced_m * reduced_m;
}

double coupling_from_f(double f, const CavityOptics& o, const PhysicalConstants& c) {
    require_positive(f, "oscillator strength");
    const double v = mode_volume(o, c);
    const double e = c.elementary_charge;
    const double omega = std::sqrt(e * e * f / (4.0 * c.vacuum_permittivity * o.eps_r * c.electron_mass * v));
    const double g_joule = o.position_factor * c.reduced_planck * omega;
    return g_joule / e * 1e3;
}

double f_from_coupling(double g_mev, const CavityOptics& o, const PhysicalConstants& c) {
    require_positive(g_mev, "coupling constant");
    const double v = mode_volume(o, c);
    const double e = c.elementary_charge;
    const double omega = g_mev * 1e-3 * e / (c.reduced_planck * o.position_factor);
    return 4.0 * c.vacuum_permittivity * o.eps_r * c.electron_mass * v * omega * omega / (e * e);
}

double quality_factor(double energy_mev, double gamma_mev) {
    require_positive(energy_mev, "energy");
    require_positive(gamma_mev, "linewidth");
    return energy_mev / gamma_mev;
}

} // namespace cqed
