#include "cqed/errors.hpp"
#include "cqed/lm.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace cqed;

namespace {

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

} // namespace

TEST_CASE("linear residual converges in at most two iterations") {
    const auto fn = [](std::span<const double> p, std::span<double> r) { r[0] = p[0] - 3.0; };
    const FitResult res = lm_minimize(fn, 1, {0.0});
    CHECK(res.converged);
    CHECK(res.n_iterations <= 2);
    CHECK(std::abs(res.params[0] - 3.0) < 1e-8);
    CHECK(res.names == std::vector<std::string>{"p0"});
}

TEST_CASE("rosenbrock") {
    const auto fn = [](std::span<const double> p, std::span<double> r) {
        r[0] = 10.0 * (p[1] - p[0] * p[0]);
        r[1] = 1.0 - p[0];
    };
    const FitResult res = lm_minimize(fn, 2, {-1.2, 1.0});
    CHECK(res.converged);
    CHECK(std::abs(res.params[0] - 1.0) < 1e-6);
    CHECK(std::abs(res.params[1] - 1.0) < 1e-6);
    CHECK(non_increasing(res.cost_history));
    CHECK(res.cost_history.front() == doctest::Approx(0.5 * (4.4 * 4.4 + 2.2 * 2.2)));

    LmOptions tight;
    tight.max_iterations = 2;
    const FitResult cut = lm_minimize(fn, 2, {-1.2, 1.0}, {}, tight);
    CHECK_FALSE(cut.converged);
    CHECK_FALSE(cut.message.empty());
    CHECK(cut.n_iterations == 2);
}

TEST_CASE("linear regression uncertainties match the closed form") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.3);
    const int m = 40;
    std::vector<double> x(m), y(m);
    for (int i = 0; i < m; ++i) {
        x[i] = 0.25 * i;
        y[i] = 1.5 + 0.7 * x[i] + noise(rng);
    }
    const auto fn = [&](std::span<const double> p, std::span<double> r) {
        for (int i = 0; i < m; ++i) r[i] = p[0] + p[1] * x[i] - y[i];
    };
    const FitResult res = lm_minimize(fn, m, {0.0, 0.0});
    REQUIRE(res.converged);

    // ordinary least squares by hand
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = m * sxx - sx * sx;
    const double b = (m * sxy - sx * sy) / det;
    const double a = (sy - b * sx) / m;
    double rss = 0;
    for (int i = 0; i < m; ++i) rss += std::pow(a + b * x[i] - y[i], 2);
    const double s2 = rss / (m - 2);
    const double var_a = s2 * sxx / det;
    const double var_b = s2 * m / det;

    CHECK(res.params[0] == doctest::Approx(a).epsilon(1e-9));
    CHECK(res.params[1] == doctest::Approx(b).epsilon(1e-9));
    CHECK(res.sigmas[0] == doctest::Approx(std::sqrt(var_a)).epsilon(1e-6));
    CHECK(res.sigmas[1] == doctest::Approx(std::sqrt(var_b)).epsilon(1e-6));
    CHECK(res.residual_rms == doctest::Approx(std::sqrt(rss / m)).epsilon(1e-9));
    CHECK(non_increasing(res.cost_history));
}

TEST_CASE("bounds are respected") {
    const auto fn = [](std::span<const double> p, std::span<double> r) {
        r[0] = p[0] - 3.0;
        r[1] = p[1] + 1.0;
    };
    const FitResult res = lm_minimize(fn, 2, {0.0, 0.0}, Bounds{{-10.0, 0.0}, {2.0, 10.0}});
    CHECK(res.params[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.params[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.converged);

    CHECK_THROWS_AS(lm_minimize(fn, 2, {0.0, 0.0}, Bounds{{1.0}, {}}), InvalidInput);
    CHECK_THROWS_AS(lm_minimize(fn, 2, {0.0, 0.0}, Bounds{{1.0, 1.0}, {0.0, 2.0}}), InvalidInput);
}

TEST_CASE("unidentifiable parameters get infinite uncertainty") {
    const auto fn = [](std::span<const double> p, std::span<double> r) {
        for (int i = 0; i < 5; ++i) r[i] = p[0] + p[1] - 2.0 + 0.01 * (i - 2);
    };
    const FitResult res = lm_minimize(fn, 5, {0.0, 0.0});
    CHECK(res.params[0] + res.params[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::isinf(res.sigmas[0]));
    CHECK(std::isinf(res.sigmas[1]));
}

TEST_CASE("non-finite residuals at the start are rejected") {
    const auto fn = [](std::span<const double> p, std::span<double> r) { r[0] = std::log(p[0]); };
    CHECK_THROWS_AS(lm_minimize(fn, 1, {-1.0}), InvalidInput);
}

TEST_CASE("exponential decay fit") {
    const int m = 30;
    std::vector<double> t(m), y(m);
    for (int i = 0; i < m; ++i) {
        t[i] = 0.1 * i;
        y[i] = 2.5 * std::exp(-1.3 * t[i]) + 0.2;
    }
    const auto fn = [&](std::span<const double> p, std::span<double> r) {
        for (int i = 0; i < m; ++i) r[i] = p[0] * std::exp(-p[1] * t[i]) + p[2] - y[i];
    };
    const FitResult res = lm_minimize(fn, m, {1.0, 0.5, 0.0});
    CHECK(res.converged);
    CHECK(res.params[0] == doctest::Approx(2.5).epsilon(1e-7));
    CHECK(res.params[1] == doctest::Approx(1.3).epsilon(1e-7));
    CHECK(res.params[2] == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(non_increasing(res.cost_history));
    CHECK(res.residual_rms < 1e-8);
}
