#include "cqed/model_core.hpp"

#include "cqed/errors.hpp"

#include <cmath>
#include <numbers>

namespace cqed {

void validate(const CoupledSystem& sys) {
    const double values[] = {sys.e_qd, sys.e_c, sys.g, sys.gamma_qd, sys.gamma_cm};
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("coupled system: non-finite parameter");
    }
    if (sys.e_qd <= 0.0 || sys.e_c <= 0.0) throw InvalidInput("coupled system: energies must be positive");
    if (sys.g < 0.0) throw InvalidInput("coupled system: g must be non-negative");
    if (sys.gamma_qd <= 0.0 || sys.gamma_cm <= 0.0)
        throw InvalidInput("coupled system: linewidths must be positive");
}

const char* to_string(Regime r) noexcept {
    return r == Regime::strong ? "strong" : "weak";
}

DressedEnergies dressed_energies(const CoupledSystem& sys) {
    validate(sys);
    const double mean = 0.5 * (sys.e_qd + sys.e_c);
    const double half = 0.5 * std::hypot(sys.detuning(), 2.0 * sys.g);
    return {mean + half, mean - half};
}

namespace {

struct Fractions {
    double exciton_upper;
    double exciton_lower;
};

// Both weights evaluated without cancellation: whichever of 1 +- delta/s would
// cancel is replaced by the equivalent 2g^2 / (s (s -+ delta)).
Fractions fractions(const CoupledSystem& sys) {
    validate(sys);
    const double delta = sys.detuning();
    if (sys.g == 0.0 && delta == 0.0)
        throw DegenerateCoupling("mixing fraction undefined: g = 0 at zero detuning");
    const double s = std::hypot(delta, 2.0 * sys.g);
    const double g2 = 2.0 * sys.g * sys.g;
    if (delta >= 0.0) return {0.5 * (1.0 + delta / s), g2 / (s * (s + delta))};
    return {g2 / (s * (s - delta)), 0.5 * (1.0 - delta / s)};
}

} // namespace

double mixing_fraction(const CoupledSystem& sys) { return fractions(sys).exciton_upper; }

BranchWidths branch_linewidths(const CoupledSystem& sys) {
    const auto [x, y] = fractions(sys);
    return {x * sys.gamma_qd + y * sys.gamma_cm, y * sys.gamma_qd + x * sys.gamma_cm};
}

DressedStates dressed_states(const CoupledSystem& sys) {
    const auto e = dressed_energies(sys);
    const auto f = fractions(sys);
    const auto w = branch_linewidths(sys);
    return {e.upper, e.lower, f.exciton_upper, f.exciton_lower, w.upper, w.lower};
}

RegimeReport classify_regime(const CoupledSystem& sys) {
    validate(sys);
    RegimeReport r;
    r.splitting_at_resonance = 2.0 * sys.g;
    r.resolvability_ratio = r.splitting_at_resonance / (0.5 * (sys.gamma_qd + sys.gamma_cm));
    r.regime = r.resolvability_ratio > 1.0 ? Regime::strong : Regime::weak;
    return r;
}

double purcell_factor(double q, double volume_factor, double n, double lambda_nm) {
    if (!(q > 0.0) || !(volume_factor > 0.0) || !(n > 0.0) || !(lambda_nm > 0.0))
        throw InvalidInput("purcell_factor: Q, volume factor, index and wavelength must be positive");
    const double reduced = lambda_nm / n;
    const double volume = volume_factor * reduced * reduced * reduced;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 3.0 * q * lambda_nm * lambda_nm * lambda_nm / (4.0 * pi2 * n * n * n * volume);
}

} // namespace cqed
