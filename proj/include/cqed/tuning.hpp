#pragma once

#include "cqed/model_core.hpp"

namespace cqed {

// Temperature dependence of the bare lines. Energies in meV, T in K.
//
//   E_QD(T)     = qd_e0 - qd_alpha T^2 / (T + qd_beta)          (Varshni)
//   E_C(T)      = cm_e0 - cm_c1 T - cm_c2 T^2
//   gamma_QD(T) = gamma_qd_0 + gamma_qd_slope T
//                 + gamma_qd_act / (exp(act_energy / kT) - 1)   (off by default)
//   gamma_CM    = const
//
// Defaults reproduce the calibrated scenario: crossing at T* ~ 30 K near
// 1660.4 meV with both linewidths 0.2 meV at T*.
struct TuningModel {
    double qd_e0 = 1662.48;
    double qd_alpha = 0.5405;  // meV/K, GaAs
    double qd_beta = 204.0;    // K, GaAs
    double cm_e0 = 1661.0;
    double cm_c1 = 0.005;      // meV/K
    double cm_c2 = 0.0005;     // meV/K^2
    double gamma_qd_0 = 0.08;
    double gamma_qd_slope = 0.004;  // meV/K
    double gamma_qd_act = 0.0;      // meV, amplitude of the activated term
    double act_energy = 10.0;       // meV
    double gamma_cm = 0.2;
};

void validate(const TuningModel& model);

// Thermal shifts relative to 0 K (E(T) - E(0)).
double qd_shift(const TuningModel& model, double t);
double cm_shift(const TuningModel& model, double t);

double qd_energy(const TuningModel& model, double t);
double cm_energy(const TuningModel& model, double t);
double gamma_qd(const TuningModel& model, double t);
double detuning(const TuningModel& model, double t);

// Bare parameters at temperature t with coupling g.
CoupledSystem system_at(const TuningModel& model, double g, double t);

// Zero of E_QD(T) - E_C(T) on [t_lo, t_hi] by bisection. Throws NoSignChange
// when the detuning does not change sign on the bracket.
double resonance_temperature(const TuningModel& model, double t_lo, double t_hi);

} // namespace cqed
