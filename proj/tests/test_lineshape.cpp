#include "cqed/errors.hpp"
#include "cqed/lineshape.hpp"
#include "cqed/model_core.hpp"
#include "cqed/tuning.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

using namespace cqed;

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

// Indices of strict local maxima.
std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) idx.push_back(i);
    return idx;
}

CoupledSystem resonant(double g = 0.2, double gqd = 0.2, double gcm = 0.2) {
    return {1661.0, 1661.0, g, gqd, gcm};
}

} // namespace

TEST_CASE("lorentzian values") {
    CHECK(lorentzian(1661.0, 1661.0, 0.2) == doctest::Approx(1.0 / (std::numbers::pi * 0.1)).epsilon(1e-15));
    CHECK(lorentzian(1661.0, 1661.0, 0.2) == doctest::Approx(3.1831).epsilon(1e-4));
    CHECK(lorentzian(1661.1, 1661.0, 0.2) == doctest::Approx(0.5 * lorentzian(1661.0, 1661.0, 0.2)).epsilon(1e-12));
    CHECK(lorentzian(1660.9, 1661.0, 0.2) == doctest::Approx(0.5 * lorentzian(1661.0, 1661.0, 0.2)).epsilon(1e-12));
    CHECK_THROWS_AS(lorentzian(1661.0, 1661.0, 0.0), InvalidInput);
}

TEST_CASE("lorentzian is area normalized") {
    const auto e = make_grid(1661.0, 50 * 0.2, 0.001);
    std::vector<double> y(e.size());
    std::transform(e.begin(), e.end(), y.begin(), [](double x) { return lorentzian(x, 1661.0, 0.2); });
    const double area = trapezoid(e, y);
    CHECK(std::abs(area - 1.0) < 1e-2);
    // analytic mass inside +-50 FWHM
    CHECK(area == doctest::Approx(2.0 / std::numbers::pi * std::atan(100.0)).epsilon(1e-6));
}

TEST_CASE("energy grid") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    CHECK(e.size() == 601);
    CHECK(e[300] == 1661.0);
    CHECK(e.front() == doctest::Approx(1658.0).epsilon(1e-15));
    CHECK(e.back() == doctest::Approx(1664.0).epsilon(1e-15));
    CHECK(grid_step(e) == doctest::Approx(0.01).epsilon(1e-9));
    for (std::size_t i = 0; i < 300; ++i) CHECK(e[300 + i] - 1661.0 == -(e[300 - i] - 1661.0));

    std::vector<double> uneven = {1.0, 2.0, 3.5};
    CHECK_THROWS_AS(grid_step(uneven), InvalidInput);
    std::vector<double> one = {1.0};
    CHECK_THROWS_AS(grid_step(one), InvalidInput);
}

TEST_CASE("instrument kernel") {
    const auto k = instrument_kernel(0.08, 0.01);
    CHECK(k.size() % 2 == 1);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
    const double sigma = 0.08 / (2 * std::sqrt(2 * std::numbers::ln2));
    double var = 0.0;
    const long r = static_cast<long>(k.size() / 2);
    for (long j = -r; j <= r; ++j) var += k[j + r] * (j * 0.01) * (j * 0.01);
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(1e-3));
    CHECK(instrument_kernel(0.0, 0.01) == std::vector<double>{1.0});
    CHECK_THROWS_AS(instrument_kernel(-0.1, 0.01), InvalidInput);
}

TEST_CASE("convolution preserves integrated area") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    const std::vector<Line> lines = {{1661.2, 0.2, 1.3}, {1660.8, 0.15, 0.7}};
    const auto raw = render_lines(e, lines, 0.0, 0.0);
    const auto conv = render_lines(e, lines, 0.0, 0.08);
    const double a0 = std::accumulate(raw.begin(), raw.end(), 0.0);
    const double a1 = std::accumulate(conv.begin(), conv.end(), 0.0);
    CHECK(a1 == doctest::Approx(a0).epsilon(1e-3));
    // the resolution lowers the peaks
    CHECK(*std::max_element(conv.begin(), conv.end()) < *std::max_element(raw.begin(), raw.end()));
}

TEST_CASE("resonant doublet has two equal peaks split by 2g") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    const Spectrum s = doublet_spectrum(resonant(), EmissionModel{1.0, 3.0, 0.0}, e, 0.0);
    const auto peaks = local_maxima(s.intensities);
    REQUIRE(peaks.size() == 2);
    CHECK(s.intensities[peaks[0]] == doctest::Approx(s.intensities[peaks[1]]).epsilon(1e-12));
    CHECK(e[peaks[1]] - e[peaks[0]] == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("resonant doublet is mirror symmetric") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    for (double res : {0.0, 0.08}) {
        for (const EmissionModel em : {EmissionModel{1.0, 0.5, 0.0}, EmissionModel{0.2, 3.0, 1.0}}) {
            const Spectrum s = doublet_spectrum(resonant(), em, e, res);
            const double peak = *std::max_element(s.intensities.begin(), s.intensities.end());
            double worst = 0.0;
            for (std::size_t i = 0; i < e.size(); ++i)
                worst = std::max(worst, std::abs(s.intensities[i] - s.intensities[e.size() - 1 - i]));
            CHECK(worst < 1e-10 * peak);
        }
    }
}

TEST_CASE("unconvolved peaks sit at the dressed energies") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    for (double delta : {-0.3, -0.1, 0.05, 0.2}) {
        const CoupledSystem sys{1661.0 + delta, 1661.0, 0.2, 0.2, 0.2};
        const auto d = dressed_energies(sys);
        const Spectrum s = doublet_spectrum(sys, EmissionModel{1.0, 1.0, 0.0}, e, 0.0);
        const auto peaks = local_maxima(s.intensities);
        REQUIRE(peaks.size() == 2);
        CHECK(std::abs(e[peaks[0]] - d.lower) <= 0.01);
        CHECK(std::abs(e[peaks[1]] - d.upper) <= 0.01);
    }
}

TEST_CASE("instrument resolution reduces the doublet contrast") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    auto contrast = [&](double res) {
        const Spectrum s = doublet_spectrum(resonant(), EmissionModel{}, e, res);
        const double peak = *std::max_element(s.intensities.begin(), s.intensities.end());
        return peak / s.intensities[300];
    };
    CHECK(contrast(0.08) < contrast(0.0));
    CHECK(contrast(0.16) < contrast(0.08));
    CHECK(contrast(0.08) > 1.0);
}

TEST_CASE("uncoupled lines") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    const CoupledSystem sys{1661.5, 1660.5, 0.0, 0.1, 0.2};
    const Spectrum s = doublet_spectrum(sys, EmissionModel{1.0, 0.0, 0.0}, e, 0.0);
    for (std::size_t i = 0; i < e.size(); ++i)
        CHECK(s.intensities[i] == doctest::Approx(lorentzian(e[i], 1661.5, 0.1)).epsilon(1e-13));

    const auto lines = doublet_lines({1660.5, 1661.5, 0.0, 0.1, 0.2}, EmissionModel{});
    CHECK(lines[0].center == 1661.5);
    CHECK(lines[0].fwhm == 0.2);
    CHECK(lines[0].area == 0.5);
    CHECK(lines[1].center == 1660.5);
}

TEST_CASE("branch amplitudes follow the mixing") {
    const CoupledSystem sys{1661.4, 1661.0, 0.2, 0.3, 0.1};
    const double x = mixing_fraction(sys);
    const auto lines = doublet_lines(sys, EmissionModel{1.0, 0.5, 0.0});
    CHECK(lines[0].area == doctest::Approx(x + 0.5 * (1 - x)).epsilon(1e-14));
    CHECK(lines[1].area == doctest::Approx((1 - x) + 0.5 * x).epsilon(1e-14));
    CHECK(lines[0].area + lines[1].area == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("coarse grid warning") {
    std::vector<std::string> warnings;
    const auto fine = make_grid(1661.0, 3.0, 0.01);
    doublet_spectrum(resonant(), EmissionModel{}, fine, 0.08, 30.0, &warnings);
    CHECK(warnings.empty());
    const auto coarse = make_grid(1661.0, 3.0, 0.1);
    doublet_spectrum(resonant(), EmissionModel{}, coarse, 0.08, 30.0, &warnings);
    CHECK(warnings.size() == 1);
}

TEST_CASE("series minimum splitting sits near the crossing") {
    const TuningModel m;
    std::vector<double> temps;
    for (double t = 4.0; t <= 44.0; t += 2.0) temps.push_back(t);
    const auto series = simulate_series(m, 0.2, EmissionModel{}, temps, GridSpec{}, 0.08);
    REQUIRE(series.size() == 21);
    double best = 1e9, t_best = 0.0;
    for (const auto& s : series) {
        CHECK(s.energies.size() == 601);
        CHECK(s.resolution_fwhm == 0.08);
        const auto lines = doublet_lines(system_at(m, 0.2, s.temperature), EmissionModel{});
        if (lines[0].center - lines[1].center < best) {
            best = lines[0].center - lines[1].center;
            t_best = s.temperature;
        }
    }
    CHECK(t_best == 30.0);
    CHECK(best == doctest::Approx(0.4).epsilon(1e-4));

    GridSpec fixed;
    fixed.center = 1660.0;
    const auto pinned = simulate_series(m, 0.2, EmissionModel{}, temps, fixed, 0.08);
    for (const auto& s : pinned) CHECK(s.energies[300] == 1660.0);
}

TEST_CASE("noise") {
    const auto e = make_grid(1661.0, 3.0, 0.01);
    const Spectrum clean = doublet_spectrum(resonant(), EmissionModel{1.0, 0.5, 20.0}, e, 0.08);
    CHECK(add_noise(clean, 0.0, 5).intensities == clean.intensities);
    const Spectrum a = add_noise(clean, 0.5, 42);
    const Spectrum b = add_noise(clean, 0.5, 42);
    const Spectrum c = add_noise(clean, 0.5, 43);
    CHECK(a.intensities == b.intensities);
    CHECK(a.intensities != c.intensities);

    double sum2 = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) sum2 += std::pow(a.intensities[i] - clean.intensities[i], 2);
    CHECK(std::sqrt(sum2 / e.size()) == doctest::Approx(0.5).epsilon(0.1));

    const Spectrum low = add_noise(doublet_spectrum(resonant(), EmissionModel{}, e, 0.0), 1.0, 1);
    for (double v : low.intensities) CHECK(v >= 0.0);
    CHECK_THROWS_AS(add_noise(clean, -1.0, 1), InvalidInput);
}

TEST_CASE("spectrum and emission validation") {
    CHECK_THROWS_AS(validate(EmissionModel{0.0, 0.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(validate(EmissionModel{-1.0, 2.0, 0.0}), InvalidInput);
    Spectrum s;
    s.energies = {1.0, 2.0, 3.0};
    s.intensities = {1.0, 2.0};
    CHECK_THROWS_AS(validate(s), InvalidInput);
    s.intensities = {1.0, -2.0, 0.0};
    CHECK_THROWS_AS(validate(s), InvalidInput);
    s.intensities = {1.0, 2.0, 0.0};
    CHECK_NOTHROW(validate(s));
    s.resolution_fwhm = -0.1;
    CHECK_THROWS_AS(validate(s), InvalidInput);
}
