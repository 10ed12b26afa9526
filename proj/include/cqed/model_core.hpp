#pragma once

// Two-level exciton / cavity-photon model at a single temperature.
// Energies and linewidths are in meV; linewidths are FWHM.

namespace cqed {

struct CoupledSystem {
    double e_qd = 0.0;      // bare exciton energy
    double e_c = 0.0;       // bare cavity-mode energy
    double g = 0.0;         // coupling constant (half the vacuum Rabi splitting)
    double gamma_qd = 0.0;  // exciton FWHM
    double gamma_cm = 0.0;  // cavity-mode FWHM

    double detuning() const noexcept { return e_qd - e_c; }
};

// Throws InvalidInput when the system violates its invariants
// (non-finite values, non-positive energies or widths, negative g).
void validate(const CoupledSystem& sys);

struct DressedEnergies {
    double upper = 0.0;
    double lower = 0.0;
    double splitting() const noexcept { return upper - lower; }
};

struct BranchWidths {
    double upper = 0.0;
    double lower = 0.0;
};

struct DressedStates {
    double e_upper = 0.0;
    double e_lower = 0.0;
    double exciton_fraction_upper = 0.0;
    double exciton_fraction_lower = 0.0;  // = 1 - exciton_fraction_upper
    double gamma_upper = 0.0;
    double gamma_lower = 0.0;
};

enum class Regime { strong, weak };

struct RegimeReport {
    Regime regime = Regime::weak;
    double splitting_at_resonance = 0.0;  // 2g
    double resolvability_ratio = 0.0;     // 2g / mean linewidth
};

const char* to_string(Regime r) noexcept;

// Eigenvalues of [[E_QD, g], [g, E_C]].
DressedEnergies dressed_energies(const CoupledSystem& sys);

// Exciton weight |<X|upper>|^2. Throws DegenerateCoupling for g == 0 at zero detuning.
double mixing_fraction(const CoupledSystem& sys);

// Branch FWHM as the exciton/photon weighted mean of the bare widths.
BranchWidths branch_linewidths(const CoupledSystem& sys);

DressedStates dressed_states(const CoupledSystem& sys);

// Strong iff the doublet is resolved: 2g > (gamma_qd + gamma_cm) / 2.
RegimeReport classify_regime(const CoupledSystem& sys);

// Standard Purcell factor Fp = 3 Q lambda^3 / (4 pi^2 n^3 V), with the mode
// volume given as a multiple of (lambda/n)^3. lambda_nm and n only set the
// absolute volume and cancel in the result.
double purcell_factor(double q, double volume_factor, double n, double lambda_nm);

} // namespace cqed
