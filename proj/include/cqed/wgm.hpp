#pragma once

// Whispering-gallery modes of a thin microdisk in the effective-index
// approximation: the vertical slab mode fixes n_eff(lambda), and the in-plane
// resonance uses a closed (perfectly reflecting) boundary,
//     j_{m,p} = n_eff(lambda) * (2 pi / lambda) * R,
// with j_{m,p} the p-th zero of J_m. Radiation leakage is not modeled, so
// positions carry an error of a fraction of the free spectral range.

#include <vector>

namespace cqed {

enum class Polarization { TE, TM };

const char* to_string(Polarization p) noexcept;

// n(lambda) = n0 + dn_dlambda * (lambda - lambda0)
struct CoreIndexModel {
    double n0 = 3.5;
    double dn_dlambda = 0.0;  // 1/nm
    double lambda0_nm = 750.0;

    double at(double lambda_nm) const noexcept { return n0 + dn_dlambda * (lambda_nm - lambda0_nm); }
};

struct DiskGeometry {
    double diameter_um = 2.0;
    double thickness_nm = 250.0;
    CoreIndexModel core;
    double clad_index = 1.0;
};

// Positive finite sizes and clad >= 1. A core index at or below the cladding is
// not rejected here; the slab solver reports it as SlabCutoff.
void validate(const DiskGeometry& geom);

struct WgmMode {
    int azimuthal_m = 0;
    int radial_p = 0;
    Polarization polarization = Polarization::TE;
    double energy = 0.0;  // meV
    double n_eff = 0.0;   // slab index at the mode wavelength
};

// Effective index of the fundamental mode of the symmetric core/clad slab.
// Throws SlabCutoff when the core index does not exceed the cladding.
double slab_n_eff(const DiskGeometry& geom, double lambda_nm, Polarization pol);

// p-th positive zero of the Bessel function J_m (m >= 0, p >= 1).
double bessel_zero(int m, int p);

// Self-consistent resonance energy (meV) of mode (m, p, pol).
double resonance_energy(const DiskGeometry& geom, int m, int p, Polarization pol);

// All modes with m >= 1 whose energy lies in [e_min, e_max), sorted by energy.
// Empty when e_max <= e_min.
std::vector<WgmMode> find_modes(const DiskGeometry& geom, double e_min, double e_max);

// E(m+1) - E(m) for the (p, pol) family, m the mode closest to `near_mev`.
double free_spectral_range(const DiskGeometry& geom, double near_mev, Polarization pol, int p);

} // namespace cqed
