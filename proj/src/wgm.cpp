#include "cqed/wgm.hpp"

#include "cqed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cqed {

namespace {

constexpr double kHcMeVNm = 1239841.984;
constexpr double kPi = std::numbers::pi;

double radius_nm(const DiskGeometry& g) { return 0.5 * g.diameter_um * 1000.0; }

// Zeros of J_m below x_max (at least `min_count` zeros when x_max is too small).
std::vector<double> bessel_zeros_below(int m, double x_max, int min_count = 0) {
    std::vector<double> zeros;
    const double step = 0.25;
    double a = m > 0 ? static_cast<double>(m) : 1e-3;
    double fa = std::cyl_bessel_j(static_cast<double>(m), a);
    while (a < x_max || static_cast<int>(zeros.size()) < min_count) {
        const double b = a + step;
        const double fb = std::cyl_bessel_j(static_cast<double>(m), b);
        if (fa == 0.0) {
            zeros.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0)) {
            double lo = a, hi = b, flo = fa;
            for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                const double fm = std::cyl_bessel_j(static_cast<double>(m), mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double z = 0.5 * (lo + hi);
            if (z >= x_max && static_cast<int>(zeros.size()) >= min_count) break;
            zeros.push_back(z);
        }
        a = b;
        fa = fb;
    }
    return zeros;
}

// n_eff * k * R, the in-plane size parameter at energy e.
double size_parameter(const DiskGeometry& g, double e_mev, Polarization pol) {
    const double lambda = kHcMeVNm / e_mev;
    return slab_n_eff(g, lambda, pol) * 2.0 * kPi / lambda * radius_nm(g);
}

} // namespace

const char* to_string(Polarization p) noexcept {
    return p == Polarization::TE ? "TE" : "TM";
}

void validate(const DiskGeometry& g) {
    if (!(g.diameter_um > 0.0) || !std::isfinite(g.diameter_um)) throw InvalidInput("disk diameter must be positive");
    if (!(g.thickness_nm > 0.0) || !std::isfinite(g.thickness_nm))
        throw InvalidInput("disk thickness must be positive");
    if (!(g.clad_index >= 1.0) || !std::isfinite(g.clad_index)) throw InvalidInput("cladding index must be >= 1");
    if (!std::isfinite(g.core.n0) || !std::isfinite(g.core.dn_dlambda) || !(g.core.lambda0_nm > 0.0))
        throw InvalidInput("core index model must be finite with positive reference wavelength");
}

double slab_n_eff(const DiskGeometry& geom, double lambda_nm, Polarization pol) {
    validate(geom);
    if (!(lambda_nm > 0.0)) throw InvalidInput("wavelength must be positive");
    const double n1 = geom.core.at(lambda_nm);
    const double n2 = geom.clad_index;
    if (!(n1 > n2)) throw SlabCutoff("no guided slab mode: core index does not exceed cladding at " +
                                     std::to_string(lambda_nm) + " nm");
    const double k = 2.0 * kPi / lambda_nm;
    const double half_t = 0.5 * geom.thickness_nm;
    const double v = k * half_t * std::sqrt(n1 * n1 - n2 * n2);
    const double c = pol == Polarization::TE ? 1.0 : (n1 * n1) / (n2 * n2);

    // u = kappa t/2 of the even fundamental mode: u tan u = c sqrt(V^2 - u^2), u in (0, min(V, pi/2)).
    auto f = [&](double u) { return u * std::tan(u) - c * std::sqrt(std::max(v * v - u * u, 0.0)); };
    double lo = 0.0;
    double hi = std::min(v, 0.5 * kPi);
    for (int i = 0; i < 300 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    const double u = 0.5 * (lo + hi);
    const double kappa = u / half_t;
    const double n_eff = std::sqrt(n1 * n1 - (kappa / k) * (kappa / k));
    if (!(n_eff > n2)) throw SlabCutoff("slab mode not confined at " + std::to_string(lambda_nm) + " nm");
    return n_eff;
}

double bessel_zero(int m, int p) {
    if (m < 0 || p < 1) throw InvalidInput("bessel_zero: need m >= 0 and p >= 1");
    const auto zeros = bessel_zeros_below(m, 0.0, p);
    return zeros[static_cast<std::size_t>(p - 1)];
}

namespace {

double solve_resonance(const DiskGeometry& geom, double j, Polarization pol) {
    const double r = radius_nm(geom);
    // n_clad < n_eff < n_core brackets the energy when dispersion is weak; widen otherwise.
    double lo = j * kHcMeVNm / (2.0 * kPi * r * std::max(geom.core.n0, geom.clad_index));
    double hi = j * kHcMeVNm / (2.0 * kPi * r * geom.clad_index);
    for (int i = 0; i < 60 && size_parameter(geom, lo, pol) > j; ++i) lo *= 0.9;
    for (int i = 0; i < 60 && size_parameter(geom, hi, pol) < j; ++i) hi *= 1.1;
    if (size_parameter(geom, lo, pol) > j || size_parameter(geom, hi, pol) < j)
        throw NoSignChange("resonance not bracketed");
    for (int i = 0; i < 300 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (size_parameter(geom, mid, pol) < j) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double resonance_energy(const DiskGeometry& geom, int m, int p, Polarization pol) {
    validate(geom);
    return solve_resonance(geom, bessel_zero(m, p), pol);
}

std::vector<WgmMode> find_modes(const DiskGeometry& geom, double e_min, double e_max) {
    validate(geom);
    std::vector<WgmMode> modes;
    if (!(e_max > e_min)) return modes;
    if (!(e_min > 0.0)) throw InvalidInput("window must lie at positive energies");
    for (Polarization pol : {Polarization::TE, Polarization::TM}) {
        const double x_lo = size_parameter(geom, e_min, pol);
        const double x_hi = size_parameter(geom, e_max, pol);
        // J_m has no zeros below m, so m < x_hi bounds the search.
        for (int m = 1; static_cast<double>(m) < x_hi; ++m) {
            const auto zeros = bessel_zeros_below(m, x_hi);
            for (std::size_t i = 0; i < zeros.size(); ++i) {
                const double j = zeros[i];
                if (j < x_lo || j >= x_hi) continue;
                const double e = solve_resonance(geom, j, pol);
                if (e < e_min || e >= e_max) continue;
                modes.push_back({m, static_cast<int>(i + 1), pol, e, slab_n_eff(geom, kHcMeVNm / e, pol)});
            }
        }
    }
    std::sort(modes.begin(), modes.end(), [](const WgmMode& a, const WgmMode& b) { return a.energy < b.energy; });
    return modes;
}

double free_spectral_range(const DiskGeometry& geom, double near_mev, Polarization pol, int p) {
    validate(geom);
    if (!(near_mev > 0.0)) throw InvalidInput("free_spectral_range: target energy must be positive");
    if (p < 1) throw InvalidInput("free_spectral_range: p must be >= 1");
    double prev = resonance_energy(geom, 1, p, pol);
    if (prev >= near_mev) return resonance_energy(geom, 2, p, pol) - prev;
    for (int m = 2; m < 10000; ++m) {
        const double e = resonance_energy(geom, m, p, pol);
        if (e >= near_mev) {
            // Closest of the two modes bracketing the target, then its successor.
            if (near_mev - prev <= e - near_mev) return e - prev;
            return resonance_energy(geom, m + 1, p, pol) - e;
        }
        prev = e;
    }
    throw InvalidInput("free_spectral_range: no mode of the family near the target energy");
}

} // namespace cqed
