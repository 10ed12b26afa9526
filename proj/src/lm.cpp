#include "cqed/lm.hpp"

#include "cqed/errors.hpp"
#include "cqed/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace cqed {

std::size_t FitResult::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw InvalidInput("fit result has no parameter '" + std::string(name) + "'");
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box(const Bounds& b, std::size_t n)
        : lo(n, -std::numeric_limits<double>::infinity()), hi(n, std::numeric_limits<double>::infinity()) {
        if (!b.lower.empty()) {
            if (b.lower.size() != n) throw InvalidInput("lm_minimize: lower bound size mismatch");
            lo = b.lower;
        }
        if (!b.upper.empty()) {
            if (b.upper.size() != n) throw InvalidInput("lm_minimize: upper bound size mismatch");
            hi = b.upper;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i])
                throw InvalidInput("lm_minimize: inconsistent bounds for parameter " + std::to_string(i));
    }

    void project(std::vector<double>& p) const {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
    }
};

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Problem {
public:
    Problem(const ResidualFn& fn, std::size_t m) : fn_(fn), m_(m) {}

    std::vector<double> eval(std::span<const double> p) const {
        std::vector<double> r(m_);
        fn_(p, r);
        return r;
    }

    static double cost(std::span<const double> r) { return 0.5 * kernels::sum_squares(r); }

    // Central differences, step max(1e-6, 1e-6 |p|); one-sided at an active bound.
    Mat jacobian(const std::vector<double>& p, const Box& box) const {
        const std::size_t n = p.size();
        Mat jac(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n));
        std::vector<double> work = p;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = std::max(1e-6, 1e-6 * std::abs(p[j]));
            double up = p[j] + h;
            double dn = p[j] - h;
            if (up > box.hi[j]) up = p[j];
            if (dn < box.lo[j]) dn = p[j];
            if (up == dn) {
                jac.col(static_cast<Eigen::Index>(j)).setZero();
                continue;
            }
            work[j] = up;
            const auto r_up = eval(work);
            work[j] = dn;
            const auto r_dn = eval(work);
            work[j] = p[j];
            const double inv = 1.0 / (up - dn);
            for (std::size_t i = 0; i < m_; ++i)
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (r_up[i] - r_dn[i]) * inv;
        }
        return jac;
    }

private:
    const ResidualFn& fn_;
    std::size_t m_;
};

Vec projected_gradient(const Vec& grad, const std::vector<double>& p, const Box& box) {
    Vec g = grad;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if ((p[k] <= box.lo[k] && g[i] > 0.0) || (p[k] >= box.hi[k] && g[i] < 0.0)) g[i] = 0.0;
    }
    return g;
}

// Largest cosine between the residual vector and a Jacobian column, so the
// test does not depend on the scale of the data or the parameters.
double scaled_gradient(const Vec& grad, const Mat& jac, const Eigen::Map<const Vec>& r) {
    const double rn = r.norm();
    if (rn == 0.0) return 0.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < grad.size(); ++j) {
        const double cn = jac.col(j).norm();
        if (cn == 0.0) continue;
        worst = std::max(worst, std::abs(grad[j]) / (cn * rn));
    }
    return worst;
}

std::vector<double> parameter_sigmas(const Mat& jac, double cost, std::size_t m) {
    const auto n = static_cast<std::size_t>(jac.cols());
    std::vector<double> sigmas(n, std::numeric_limits<double>::infinity());
    if (m <= n) return sigmas;
    const double s2 = 2.0 * cost / static_cast<double>(m - n);
    const Mat normal = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Mat> eig(normal);
    if (eig.info() != Eigen::Success) return sigmas;
    const Vec& lambda = eig.eigenvalues();
    const Mat& vecs = eig.eigenvectors();
    const double tol = 1e-13 * std::max(lambda.maxCoeff(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double var = 0.0;
        bool finite = true;
        for (Eigen::Index k = 0; k < lambda.size(); ++k) {
            const double v = vecs(static_cast<Eigen::Index>(i), k);
            if (lambda[k] <= tol) {
                if (std::abs(v) > 1e-6) finite = false;
                continue;
            }
            var += v * v / lambda[k];
        }
        if (finite) sigmas[i] = std::sqrt(s2 * var);
    }
    return sigmas;
}

} // namespace

FitResult lm_minimize(const ResidualFn& residuals, std::size_t n_residuals, std::vector<double> initial,
                      const Bounds& bounds, const LmOptions& options) {
    const std::size_t n = initial.size();
    if (n == 0) throw InvalidInput("lm_minimize: no parameters");
    if (n_residuals == 0) throw InvalidInput("lm_minimize: no residuals");
    const Box box(bounds, n);
    const Problem problem(residuals, n_residuals);

    std::vector<double> p = std::move(initial);
    box.project(p);
    auto r = problem.eval(p);
    if (!all_finite(r)) throw InvalidInput("lm_minimize: non-finite residual at the initial point");
    double cost = Problem::cost(r);

    FitResult result;
    result.cost_history.push_back(cost);
    double damping = options.initial_damping;
    bool stalled = false;
    int singular_retries = 0;

    Mat jac;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        jac = problem.jacobian(p, box);
        const Eigen::Map<const Vec> rv(r.data(), static_cast<Eigen::Index>(r.size()));
        const Mat normal = jac.transpose() * jac;
        const Vec grad = jac.transpose() * rv;
        if (scaled_gradient(projected_gradient(grad, p, box), jac, rv) <= options.gtol) {
            result.converged = true;
            result.message = "gradient below tolerance";
            break;
        }

        bool accepted = false;
        std::vector<double> p_new;
        std::vector<double> r_new;
        double cost_new = cost;

        // While the damping is at or below its starting value the local model
        // is trusted: take the plain Gauss-Newton step if it achieves at least
        // a quarter of its predicted decrease.
        if (damping <= options.initial_damping) {
            Eigen::LDLT<Mat> ldlt(normal);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                const Vec step = ldlt.solve(-grad);
                if (step.allFinite()) {
                    p_new = p;
                    for (std::size_t i = 0; i < n; ++i) p_new[i] += step[static_cast<Eigen::Index>(i)];
                    box.project(p_new);
                    if (p_new != p) {
                        Vec actual(static_cast<Eigen::Index>(n));
                        for (std::size_t i = 0; i < n; ++i) actual[static_cast<Eigen::Index>(i)] = p_new[i] - p[i];
                        const double predicted = -(grad.dot(actual) + 0.5 * actual.dot(normal * actual));
                        r_new = problem.eval(p_new);
                        cost_new = all_finite(r_new) ? Problem::cost(r_new) : std::numeric_limits<double>::infinity();
                        accepted = predicted > 0.0 && cost_new < cost && (cost - cost_new) >= 0.25 * predicted;
                    }
                }
            }
        }
        while (!accepted) {
            if (damping > 1e32) {
                stalled = true;
                break;
            }
            Mat damped = normal;
            for (Eigen::Index i = 0; i < damped.rows(); ++i)
                damped(i, i) += damping * std::max(normal(i, i), 1e-300);
            Eigen::LDLT<Mat> ldlt(damped);
            Vec step;
            if (ldlt.info() == Eigen::Success) step = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                ++singular_retries;
                damping *= 10.0;
                continue;
            }
            p_new = p;
            for (std::size_t i = 0; i < n; ++i) p_new[i] += step[static_cast<Eigen::Index>(i)];
            box.project(p_new);
            if (p_new == p) {
                stalled = true;
                break;
            }
            r_new = problem.eval(p_new);
            cost_new = all_finite(r_new) ? Problem::cost(r_new) : std::numeric_limits<double>::infinity();
            if (cost_new < cost) {
                accepted = true;
            } else {
                damping *= 10.0;
            }
        }
        if (stalled) {
            // No representable step lowers the cost. Near a stationary point this
            // is the precision floor of the cost itself, not a failure.
            if (scaled_gradient(projected_gradient(grad, p, box), jac, rv) <= std::sqrt(options.gtol)) {
                result.converged = true;
                result.message = "no further reduction possible at machine precision";
            }
            break;
        }

        double step_norm = 0.0;
        double p_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            step_norm += (p_new[i] - p[i]) * (p_new[i] - p[i]);
            p_norm += p[i] * p[i];
        }
        const double rel_decrease = (cost - cost_new) / cost;
        p = std::move(p_new);
        r = std::move(r_new);
        cost = cost_new;
        result.cost_history.push_back(cost);
        result.n_iterations = iter + 1;
        damping = std::max(damping / 10.0, 1e-15);

        if (rel_decrease < options.ftol) {
            result.converged = true;
            result.message = "relative cost change below tolerance";
            break;
        }
        if (std::sqrt(step_norm) <= options.xtol * (std::sqrt(p_norm) + options.xtol)) {
            result.converged = true;
            result.message = "step below tolerance";
            break;
        }
    }
    if (!result.converged) {
        result.message = stalled ? "no cost decrease possible along the damped step"
                                 : "maximum iterations reached";
    }
    if (singular_retries > 0)
        result.message += " (" + std::to_string(singular_retries) + " singular normal-equation retries)";

    jac = problem.jacobian(p, box);
    result.sigmas = parameter_sigmas(jac, cost, n_residuals);
    result.params = std::move(p);
    result.residual_rms = std::sqrt(2.0 * cost / static_cast<double>(n_residuals));
    result.names.resize(n);
    result.units.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.names[i] = "p" + std::to_string(i);
    return result;
}

} // namespace cqed
