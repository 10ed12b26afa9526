#pragma once

// Photonic quantities linking the coupling constant to the exciton oscillator
// strength. External energies are meV, wavelengths nm, volumes m^3.

namespace cqed {

// CODATA 2018, SI.
struct PhysicalConstants {
    double vacuum_permittivity = 8.8541878128e-12;  // F/m
    double electron_mass = 9.1093837015e-31;        // kg
    double elementary_charge = 1.602176634e-19;     // C
    double reduced_planck = 1.054571817e-34;        // J s
    double hc_ev_nm = 1239.841984;                  // eV nm
};

struct CavityOptics {
    double emission_energy = 1661.0;  // meV
    double n_eff = 3.2;
    double eps_r = 3.2 * 3.2;         // relative permittivity seen by the dipole
    double mode_volume_factor = 6.0;  // V = factor * (lambda / n_eff)^3
    double position_factor = 1.0;     // spatial-mismatch reduction of g, in (0, 1]

    // eps_r follows n_eff^2.
    static CavityOptics with_index(double emission_energy, double n_eff, double mode_volume_factor = 6.0);
};

void validate(const CavityOptics& optics);

double wavelength_from_energy(double energy_mev, const PhysicalConstants& c = {});
double energy_from_wavelength(double lambda_nm, const PhysicalConstants& c = {});

double mode_volume(const CavityOptics& optics, const PhysicalConstants& c = {});

// g = position_factor * hbar * sqrt(e^2 f / (4 eps0 eps_r m V)), i.e. the
// coupling rate as an angular frequency converted to an energy (meV).
double coupling_from_f(double f, const CavityOptics& optics, const PhysicalConstants& c = {});

// Exact inverse of coupling_from_f.
double f_from_coupling(double g_mev, const CavityOptics& optics, const PhysicalConstants& c = {});

// Q = E / gamma.
double quality_factor(double energy_mev, double gamma_mev);

} // namespace cqed
