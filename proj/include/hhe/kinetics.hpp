#pragma once

// Voltage-dependent gating kinetics for the three conductance-based model
// families: neocortical (RS/FS/IB), thalamocortical relay (TCR) and
// hippocampal fast-spiking interneuron (RHI).
//
// Units: voltages mV, rates 1/ms, time constants ms.

#include <cmath>
#include <stdexcept>
#include <string>

namespace hhe {

enum class Family { neocortical, tcr, rhi };

enum class Gate { m, h, n, p, q, r };

// How a gate's dynamics are expressed.
enum class GateForm {
    alpha_beta,     // xdot = alpha(V)(1-x) - beta(V)x
    steady_tau,     // xdot = (x_inf(V) - x)/tau(V)
    instantaneous,  // x == x_inf(V), no state
};

struct GateSpec {
    Gate gate;
    GateForm form;
};

struct RatePair {
    double alpha;  // 1/ms
    double beta;   // 1/ms
};

struct SteadyTau {
    double x_inf;  // dimensionless, in [0,1]
    double tau;    // ms
};

inline constexpr double kReferenceTemperatureC = 36.0;
inline constexpr double kRateQ10 = 2.78;

inline const char* to_string(Family f) {
    switch (f) {
        case Family::neocortical: return "neocortical";
        case Family::tcr: return "TCR";
        case Family::rhi: return "RHI";
    }
    return "?";
}

inline const char* to_string(Gate g) {
    switch (g) {
        case Gate::m: return "m";
        case Gate::h: return "h";
        case Gate::n: return "n";
        case Gate::p: return "p";
        case Gate::q: return "q";
        case Gate::r: return "r";
    }
    return "?";
}

namespace detail {

// x/(e^x - 1), the singular factor shared by several opening rates.
// Near x = 0 the direct form cancels catastrophically; switch to the
// two-term Taylor expansion 1 - x/2 inside |x| < 1e-4 (error < 1e-9).
inline double expm1_ratio(double x) {
    if (std::fabs(x) < 1e-4) return 1.0 - 0.5 * x;
    return x / std::expm1(x);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

[[noreturn]] inline void bad_gate(Family f, Gate g, const char* what) {
    throw std::invalid_argument(std::string("no ") + what + " for gate '" +
                                to_string(g) + "' of family " + to_string(f));
}

}  // namespace detail

// Dynamic form of each (family, gate) pair. Unknown pairs throw.
inline GateForm gate_form(Family family, Gate gate) {
    switch (family) {
        case Family::neocortical:
            switch (gate) {
                case Gate::m:
                case Gate::h:
                case Gate::n:
                case Gate::q:
                case Gate::r: return GateForm::alpha_beta;
                case Gate::p: return GateForm::steady_tau;
            }
            break;
        case Family::tcr:
            switch (gate) {
                case Gate::h:
                case Gate::r: return GateForm::steady_tau;
                case Gate::m:
                case Gate::p: return GateForm::instantaneous;
                default: break;
            }
            break;
        case Family::rhi:
            switch (gate) {
                case Gate::m: return GateForm::instantaneous;
                case Gate::h:
                case Gate::n: return GateForm::alpha_beta;
                default: break;
            }
            break;
    }
    detail::bad_gate(family, gate, "kinetic form");
}

// Opening/closing rates for alpha-beta gates. v_t shifts the neocortical
// rates along the voltage axis; TCR and RHI ignore it.
inline RatePair rate_pair(Family family, Gate gate, double v, double v_t = 0.0) {
    using detail::expm1_ratio;
    switch (family) {
        case Family::neocortical: {
            const double u = v - v_t;
            switch (gate) {
                case Gate::m:
                    return {1.28 * expm1_ratio(-(u - 13.0) / 4.0),
                            1.4 * expm1_ratio((u - 40.0) / 5.0)};
                case Gate::h:
                    return {0.128 * std::exp(-(u - 17.0) / 18.0),
                            4.0 / (1.0 + std::exp(-(u - 40.0) / 5.0))};
                case Gate::n:
                    return {0.16 * expm1_ratio(-(u - 15.0) / 5.0),
                            0.5 * std::exp(-(u - 10.0) / 40.0)};
                case Gate::q:  // L-type Ca activation, no v_t shift
                    return {0.209 * expm1_ratio((-27.0 - v) / 3.8),
                            0.94 * std::exp((-75.0 - v) / 17.0)};
                case Gate::r:  // L-type Ca inactivation
                    return {0.000457 * std::exp((-13.0 - v) / 50.0),
                            0.0065 / (std::exp((-15.0 - v) / 28.0) + 1.0)};
                default: break;
            }
            break;
        }
        case Family::rhi:
            switch (gate) {
                case Gate::m:  // used only through its steady state
                    return {expm1_ratio(-0.1 * (v + 35.0)),
                            4.0 * std::exp(-(v + 60.0) / 18.0)};
                case Gate::h:
                    return {0.07 * std::exp(-(v + 58.0) / 20.0),
                            1.0 / (std::exp(-0.1 * (v + 28.0)) + 1.0)};
                case Gate::n:
                    return {0.1 * expm1_ratio(-0.1 * (v + 34.0)),
                            0.125 * std::exp(-(v + 44.0) / 80.0)};
                default: break;
            }
            break;
        case Family::tcr: break;
    }
    detail::bad_gate(family, gate, "alpha/beta pair");
}

// Steady state and time constant for steady_tau gates. tau_max enters only
// the neocortical p gate; pass the cell's value (ignored elsewhere).
inline SteadyTau steady_tau(Family family, Gate gate, double v, double tau_max = 0.0) {
    using detail::sigmoid;
    switch (family) {
        case Family::neocortical:
            if (gate == Gate::p) {
                const double x_inf = sigmoid((v + 35.0) / 10.0);
                const double tau = tau_max / (3.3 * std::exp((v + 35.0) / 20.0) +
                                              std::exp(-(v + 35.0) / 20.0));
                return {x_inf, tau};
            }
            break;
        case Family::tcr:
            switch (gate) {
                case Gate::h: {
                    const double h_inf = sigmoid(-(v + 41.0) / 4.0);
                    const double a1 = 0.128 * std::exp(-(v + 46.0) / 18.0);
                    const double b1 = 4.0 / (1.0 + std::exp(-(v + 23.0) / 5.0));
                    return {h_inf, 1.0 / (a1 + b1)};
                }
                case Gate::r: {
                    const double r_inf = sigmoid(-(v + 84.0) / 4.0);
                    const double tau = 0.4 * (std::exp(-(v + 25.0) / 10.5) + 28.0);
                    return {r_inf, tau};
                }
                default: break;
            }
            break;
        case Family::rhi: break;
    }
    detail::bad_gate(family, gate, "steady-state/tau form");
}

// Value of an instantaneous gate at voltage v.
inline double instantaneous_gate(Family family, Gate gate, double v) {
    switch (family) {
        case Family::tcr:
            if (gate == Gate::m) return detail::sigmoid((v + 37.0) / 7.0);
            if (gate == Gate::p) return detail::sigmoid((v + 60.0) / 6.2);
            break;
        case Family::rhi:
            if (gate == Gate::m) {
                const RatePair ab = rate_pair(Family::rhi, Gate::m, v);
                return ab.alpha / (ab.alpha + ab.beta);
            }
            break;
        case Family::neocortical: break;
    }
    detail::bad_gate(family, gate, "instantaneous steady state");
}

// Temperature scaling of all gating kinetics: k multiplies every alpha/beta
// pair and divides every tau. Unity at 36 degC.
inline double temperature_factor(double temperature_c) {
    if (!(temperature_c > 0.0 && temperature_c < 50.0))
        throw std::invalid_argument("temperature " + std::to_string(temperature_c) +
                                    " degC outside supported range (0, 50)");
    return std::pow(kRateQ10, (temperature_c - kReferenceTemperatureC) / 10.0);
}

inline double gate_derivative(double x, double alpha, double beta, double k = 1.0) {
    return k * (alpha * (1.0 - x) - beta * x);
}

inline double relaxation_derivative(double x, double x_inf, double tau, double k = 1.0) {
    return k * (x_inf - x) / tau;
}

}  // namespace hhe
