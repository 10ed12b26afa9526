#include "cqed/tuning.hpp"

#include "cqed/errors.hpp"

#include <cmath>

namespace cqed {

namespace {

constexpr double kBoltzmannMeVPerK = 0.08617333262;

void check_temperature(double t) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("temperature must be finite and >= 0 K");
}

} // namespace

void validate(const TuningModel& m) {
    const double all[] = {m.qd_e0, m.qd_alpha, m.qd_beta, m.cm_e0, m.cm_c1, m.cm_c2,
                          m.gamma_qd_0, m.gamma_qd_slope, m.gamma_qd_act, m.act_energy, m.gamma_cm};
    for (double v : all)
        if (!std::isfinite(v)) throw InvalidInput("tuning model: non-finite coefficient");
    if (m.qd_e0 <= 0.0 || m.cm_e0 <= 0.0) throw InvalidInput("tuning model: 0 K energies must be positive");
    if (m.qd_beta <= 0.0) throw InvalidInput("tuning model: qd_beta must be positive");
    if (m.gamma_qd_0 <= 0.0 || m.gamma_cm <= 0.0) throw InvalidInput("tuning model: linewidths must be positive");
    if (m.qd_alpha < 0.0 || m.cm_c1 < 0.0 || m.cm_c2 < 0.0 || m.gamma_qd_slope < 0.0 || m.gamma_qd_act < 0.0)
        throw InvalidInput("tuning model: shift and broadening coefficients must be non-negative");
    if (m.act_energy <= 0.0) throw InvalidInput("tuning model: activation energy must be positive");
}

double qd_shift(const TuningModel& m, double t) {
    check_temperature(t);
    return -m.qd_alpha * t * t / (t + m.qd_beta);
}

double cm_shift(const TuningModel& m, double t) {
    check_temperature(t);
    return -m.cm_c1 * t - m.cm_c2 * t * t;
}

double qd_energy(const TuningModel& m, double t) { return m.qd_e0 + qd_shift(m, t); }

double cm_energy(const TuningModel& m, double t) { return m.cm_e0 + cm_shift(m, t); }

double gamma_qd(const TuningModel& m, double t) {
    check_temperature(t);
    double gamma = m.gamma_qd_0 + m.gamma_qd_slope * t;
    if (m.gamma_qd_act > 0.0 && t > 0.0)
        gamma += m.gamma_qd_act / std::expm1(m.act_energy / (kBoltzmannMeVPerK * t));
    return gamma;
}

double detuning(const TuningModel& m, double t) {
    return (m.qd_e0 - m.cm_e0) + (qd_shift(m, t) - cm_shift(m, t));
}

CoupledSystem system_at(const TuningModel& m, double g, double t) {
    CoupledSystem sys{qd_energy(m, t), cm_energy(m, t), g, gamma_qd(m, t), m.gamma_cm};
    validate(sys);
    return sys;
}

double resonance_temperature(const TuningModel& m, double t_lo, double t_hi) {
    check_temperature(t_lo);
    check_temperature(t_hi);
    if (t_hi < t_lo) throw InvalidInput("resonance_temperature: empty bracket");
    double f_lo = detuning(m, t_lo);
    const double f_hi = detuning(m, t_hi);
    if (f_lo == 0.0) return t_lo;
    if (f_hi == 0.0) return t_hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw NoSignChange("detuning does not change sign between " + std::to_string(t_lo) + " K and " +
                           std::to_string(t_hi) + " K");
    double lo = t_lo;
    double hi = t_hi;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = detuning(m, mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace cqed
