#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

// Writes residuals(params) into the output span. Must be pure.
using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

// Box constraints; empty vectors mean unbounded. Infinite entries are allowed.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct LmOptions {
    int max_iterations = 500;
    double ftol = 1e-10;  // relative cost decrease of an accepted step
    double gtol = 1e-8;   // max |(J^T r)_j| / (|J_j| |r|) over free directions
    double xtol = 1e-15;  // relative step length
    double initial_damping = 1e-3;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<std::string> units;
    std::vector<double> params;
    std::vector<double> sigmas;  // 1 sigma from s^2 (J^T J)^-1; +inf when unidentifiable
    double residual_rms = std::numeric_limits<double>::quiet_NaN();
    int n_iterations = 0;
    bool converged = false;
    std::string message;
    // Cost 0.5*|r|^2 at the start and after every accepted step.
    std::vector<double> cost_history;

    // Throws InvalidInput for unknown names.
    std::size_t index_of(std::string_view name) const;
    double value(std::string_view name) const { return params[index_of(name)]; }
    double sigma(std::string_view name) const { return sigmas[index_of(name)]; }
};

// Levenberg-Marquardt (Marquardt diagonal scaling) with central finite-difference
// Jacobians and projection onto the bounds. The undamped Gauss-Newton step is
// tried first whenever the damping has relaxed to its initial value. A stall where
// no representable step lowers the cost counts as converged only if the scaled
// gradient is within sqrt(gtol). Returns the best point found; when the
// iteration budget runs out converged is false. Throws InvalidInput if the
// residuals are non-finite at the start point.
FitResult lm_minimize(const ResidualFn& residuals, std::size_t n_residuals, std::vector<double> initial,
                      const Bounds& bounds = {}, const LmOptions& options = {});

} // namespace cqed
