// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "cqed/fitting.hpp"
#include "cqed/io.hpp"
#include "cqed/lineshape.hpp"
#include "cqed/model_core.hpp"
#include "cqed/optics.hpp"
#include "cqed/tuning.hpp"
#include "cqed/wgm.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cqed;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<double> temps_10() { return {4, 10, 16, 20, 24, 27, 30, 33, 38, 44}; }

PeakTable exact_table(const TuningModel& m, double g, const std::vector<double>& temps) {
    PeakTable table;
    for (double t : temps) {
        const auto d = dressed_states(system_at(m, g, t));
        PeakRow r;
        r.temperature = t;
        r.e_upper = d.e_upper;
        r.e_lower = d.e_lower;
        r.gamma_upper = d.gamma_upper;
        r.gamma_lower = d.gamma_lower;
        r.amp_upper = r.amp_lower = 1.0;
        table.rows.push_back(r);
    }
    return table;
}

TuningModel perturbed_start() {
    TuningModel m;
    m.qd_e0 += 0.3;
    m.qd_alpha *= 1.1;
    m.cm_e0 -= 0.2;
    m.cm_c1 *= 0.5;
    return m;
}

std::vector<double> local_maxima_heights(const std::vector<double>& y) {
    std::vector<double> h;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) h.push_back(y[i]);
    return h;
}

Outcome rabi_splitting() {
    const TuningModel m;
    double best = 1e9;
    for (int i = 0; i <= 47000; ++i)
        best = std::min(best, dressed_energies(system_at(m, 0.2, 4.0 + i * 1e-3)).splitting());
    const double t_star = resonance_temperature(m, 4.0, 51.0);
    best = std::min(best, dressed_energies(system_at(m, 0.2, t_star)).splitting());
    return {std::abs(best - 0.4) <= 1e-6, fmt("min splitting %.9f meV at T* = %.4f K", best, t_star)};
}

Outcome equal_intensity() {
    const TuningModel m;
    const double t_star = resonance_temperature(m, 4.0, 51.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> eta(0.05, 5.0);
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 50; ++k) {
        const EmissionModel em{eta(rng), eta(rng), 0.0};
        for (double res : {0.0, 0.08}) {
            const auto s = simulate_series(m, 0.2, em, std::vector<double>{t_star}, GridSpec{}, res).front();
            const auto h = local_maxima_heights(s.intensities);
            if (h.size() != 2) {
                ok = false;
                continue;
            }
            worst = std::max(worst, std::abs(h[0] - h[1]) / std::max(h[0], h[1]));
        }
    }
    return {ok && worst <= 1e-3, fmt("worst relative height difference %.2e over 100 spectra", worst)};
}

Outcome resonance_linewidth() {
    const BranchWidths w = branch_linewidths(CoupledSystem{1660.4, 1660.4, 0.2, 0.2, 0.2});
    bool ok = w.upper == 0.2 && w.lower == 0.2;
    cqed::testing::SystemGenerator gen(12);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        CoupledSystem s = gen();
        s.e_qd = s.e_c;
        const BranchWidths b = branch_linewidths(s);
        const double mean = 0.5 * (s.gamma_qd + s.gamma_cm);
        worst = std::max({worst, std::abs(b.upper - mean) / mean, std::abs(b.lower - mean) / mean});
    }
    ok = ok && worst <= 1e-12;
    return {ok, fmt("(%.17g, %.17g) meV; unequal widths worst rel %.1e", w.upper, w.lower, worst)};
}

Outcome anticrossing_round_trip() {
    const TuningModel truth;
    const auto temps = temps_10();
    const double g_exact = fit_anticrossing(exact_table(truth, 0.2, temps), perturbed_start()).g;

    const auto series = simulate_series(truth, 0.2, EmissionModel{}, temps, GridSpec{}, 0.08);
    const double g_spectra = fit_anticrossing(build_peak_table(series), perturbed_start()).g;

    std::vector<double> rel;
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        PeakTable t = exact_table(truth, 0.2, temps);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, 0.020);
        for (auto& r : t.rows) {
            r.e_upper += noise(rng);
            r.e_lower += noise(rng);
            if (r.e_lower > r.e_upper) std::swap(r.e_lower, r.e_upper);
        }
        const auto fit = fit_anticrossing(t, perturbed_start());
        converged += fit.result.converged ? 1 : 0;
        rel.push_back(std::abs(fit.g - 0.2) / 0.2);
    }
    std::sort(rel.begin(), rel.end());
    const double median = 0.5 * (rel[49] + rel[50]);
    const bool ok = std::abs(g_exact - 0.2) / 0.2 <= 0.01 && std::abs(g_spectra - 0.2) / 0.2 <= 0.01 && median <= 0.10;
    return {ok, fmt("noise-free g = %.6f (table), %.6f (spectra); noisy median rel err %.3f", g_exact, g_spectra,
                    median) + " (" + std::to_string(converged) + "/100 converged)"};
}

Outcome oscillator_strength() {
    double lo = 1e9, hi = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double n = 3.0 + 0.01 * i;
        const double f = f_from_coupling(0.2, CavityOptics::with_index(1661.0, n, 6.0));
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return {lo >= 70.0 && hi <= 130.0, fmt("f in [%.1f, %.1f] for n_eff in [3.0, 3.6]", lo, hi)};
}

Outcome quality() {
    const double q = quality_factor(1660.0, 0.2);
    return {std::abs(q - 8300.0) < 1e-9 && std::abs(q - 8000.0) / 8000.0 <= 0.05, fmt("Q = %.3f", q)};
}

Outcome wgm_count() {
    const DiskGeometry disk;
    const auto modes = find_modes(disk, 1661.0 - 7.5, 1661.0 + 7.5);
    const auto n = static_cast<double>(modes.size());
    return {n >= 4 && n <= 12, fmt("%.0f modes in 1653.5-1668.5 meV (closed-boundary model)", n)};
}

Outcome eigen_oracle() {
    cqed::testing::SystemGenerator gen(2024);
    double worst_e = 0.0, worst_x = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const CoupledSystem s = gen();
        const auto o = cqed::testing::eigen_oracle(s);
        const DressedStates d = dressed_states(s);
        worst_e = std::max({worst_e, cqed::testing::rel_err(d.e_upper, o.upper), cqed::testing::rel_err(d.e_lower, o.lower)});
        worst_x = std::max({worst_x, cqed::testing::rel_err(d.exciton_fraction_upper, o.exciton_fraction_upper),
                            cqed::testing::rel_err(d.exciton_fraction_lower, o.exciton_fraction_lower)});
    }
    return {worst_e <= 1e-12 && worst_x <= 1e-12, fmt("worst rel err energies %.1e, fractions %.1e", worst_e, worst_x)};
}

Outcome regime() {
    const RegimeReport paper = classify_regime(CoupledSystem{1660.4, 1660.4, 0.2, 0.2, 0.2});
    const RegimeReport low = classify_regime(CoupledSystem{1660.4, 1660.4, 0.05, 0.2, 0.2});
    const bool ok = paper.regime == Regime::strong && std::abs(paper.resolvability_ratio - 2.0) < 1e-12 &&
                    low.regime == Regime::weak;
    return {ok, std::string("g=0.2: ") + to_string(paper.regime) + fmt(" ratio %.3f; g=0.05: ", paper.resolvability_ratio) +
                    to_string(low.regime)};
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cqed_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ok = true;
    for (const char* name : {"a.csv", "b.csv"}) {
        const std::string cmd = std::string("\"" CQED_CLI_PATH "\" simulate --noise 0.05 --seed 11 --out \"") +
                                (dir / name).string() + "\" >/dev/null 2>&1";
        ok = ok && std::system(cmd.c_str()) == 0;
    }
    const std::string a = read_all(dir / "a.csv");
    ok = ok && !a.empty() && a == read_all(dir / "b.csv");

    // every format written, read back and rewritten must be identical
    std::istringstream sin(a);
    const auto spectra = io::read_spectra(sin);
    std::ostringstream sout;
    io::write_spectra(sout, spectra);
    ok = ok && sout.str() == a;

    const PeakTable table = build_peak_table(spectra);
    std::ostringstream p1, p2;
    io::write_peak_table(p1, table);
    std::istringstream pin(p1.str());
    io::write_peak_table(p2, io::read_peak_table(pin));
    ok = ok && p1.str() == p2.str();

    const auto fit = fit_anticrossing(table, TuningModel{});
    std::ostringstream f1, f2;
    io::write_fit_result(f1, fit.result);
    std::istringstream fin(f1.str());
    io::write_fit_result(f2, io::read_fit_result(fin));
    ok = ok && f1.str() == f2.str();

    fs::remove_all(dir);
    return {ok, fmt("simulate x2 byte-identical (%.0f bytes); spectra, peak table, fit result round-trip", static_cast<double>(a.size()))};
}

struct Criterion {
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"rabi splitting anchor", 1.0, rabi_splitting},
        {"equal-intensity resonance", 1.0, equal_intensity},
        {"resonance linewidth", 0.0, resonance_linewidth},
        {"anticrossing fit round-trip", 30.0, anticrossing_round_trip},
        {"oscillator-strength anchor", 1.0, oscillator_strength},
        {"quality factor", 0.0, quality},
        {"wgm mode count", 5.0, wgm_count},
        {"eigen-oracle equivalence", 0.0, eigen_oracle},
        {"regime classification", 0.0, regime},
        {"determinism and round-trips", 0.0, determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            out.pass = false;
            out.detail += fmt(" [over %.0f s budget]", c.budget_s);
        }
        if (!out.pass) ++failures;
        std::printf("%s  %2zu %-30s %s (%.3f s)\n", out.pass ? "PASS" : "FAIL", i + 1, c.name, out.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
