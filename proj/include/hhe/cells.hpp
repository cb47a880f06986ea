#pragma once

// Cell parameter registry (ten cells across three model families), ionic
// current evaluation and the full membrane state derivative
//   C dV/dt = -I_leak - I_Na - I_K - I_M - I_Ca - I_T + I_stim.
//
// Units: conductances mS/cm², capacitance µF/cm², potentials mV,
// currents µA/cm², time ms.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hhe/kinetics.hpp"

namespace hhe {

struct CellParams {
    int cell_id = 0;
    Family family = Family::neocortical;
    std::string_view label;

    double c_m = 1.0;     // membrane capacitance, µF/cm²
    double g_leak = 0.0;  // mS/cm²; absent channels stored as 0
    double g_na = 0.0;
    double g_k = 0.0;
    double g_m = 0.0;     // slow K (adaptation)
    double g_ca = 0.0;    // high-threshold Ca (bursting)
    double g_t = 0.0;     // low-threshold Ca (TCR)

    double e_leak = 0.0;  // mV
    double e_na = 0.0;
    double e_k = 0.0;
    double e_ca = 0.0;
    double e_t = 0.0;

    double v_t = 0.0;      // rate-function voltage shift, mV (neocortical)
    double tau_max = 0.0;  // slow-K time-constant scale, ms
    double phi = 1.0;      // RHI gating speed-up
    double v_x = 0.0;      // listed for cell 10 but referenced by no equation
};

// Membrane voltage plus the family's active gate values.
struct CellState {
    double v = 0.0;
    std::array<double, 6> gates{};
    std::size_t gate_count = 0;
};

// Time derivative of a CellState.
struct StateDerivative {
    double dv = 0.0;
    std::array<double, 6> dgates{};
};

struct CurrentBreakdown {
    double i_leak = 0.0;  // µA/cm²
    double i_na = 0.0;
    double i_k = 0.0;
    double i_m = 0.0;
    double i_ca = 0.0;
    double i_t = 0.0;

    double total() const { return i_leak + i_na + i_k + i_m + i_ca + i_t; }
};

// Which gate lives in which CellState slot for a given cell.
// Neocortical: m,h,n always, then p if g_m > 0, then q,r if g_ca > 0.
// TCR: h,r.  RHI: h,n.
struct GateLayout {
    std::array<Gate, 6> gates{};
    std::size_t count = 0;
    int index_p = -1;
    int index_q = -1;
    int index_r = -1;
};

inline GateLayout gate_layout(const CellParams& p) {
    GateLayout lay;
    switch (p.family) {
        case Family::neocortical:
            lay.gates[0] = Gate::m;
            lay.gates[1] = Gate::h;
            lay.gates[2] = Gate::n;
            lay.count = 3;
            if (p.g_m > 0.0) {
                lay.index_p = static_cast<int>(lay.count);
                lay.gates[lay.count++] = Gate::p;
            }
            if (p.g_ca > 0.0) {
                lay.index_q = static_cast<int>(lay.count);
                lay.gates[lay.count++] = Gate::q;
                lay.index_r = static_cast<int>(lay.count);
                lay.gates[lay.count++] = Gate::r;
            }
            break;
        case Family::tcr:
            lay.gates[0] = Gate::h;
            lay.gates[1] = Gate::r;
            lay.count = 2;
            lay.index_r = 1;
            break;
        case Family::rhi:
            lay.gates[0] = Gate::h;
            lay.gates[1] = Gate::n;
            lay.count = 2;
            break;
    }
    return lay;
}

inline std::vector<std::string> gate_names(const CellParams& p) {
    const GateLayout lay = gate_layout(p);
    std::vector<std::string> names;
    names.reserve(lay.count);
    for (std::size_t i = 0; i < lay.count; ++i) names.emplace_back(to_string(lay.gates[i]));
    return names;
}

namespace detail {

// Table of the ten cells. Dashes in the source table are zeros here; the
// g_T = 5 listed for cell 10 is dropped because the RHI model carries no
// T current (only leak, Na and K).
inline const std::array<CellParams, 10>& cell_table() {
    static const std::array<CellParams, 10> cells = {{
        {.cell_id = 1, .family = Family::neocortical,
         .label = "RS cell as observed from ferret Visual Cortex in vitro",
         .c_m = 0.29, .g_leak = 0.1, .g_na = 50.0, .g_k = 5.0, .g_m = 0.07,
         .e_leak = -70.0, .e_na = 50.0, .e_k = -90.0,
         .v_t = -61.5, .tau_max = 4000.0},
        {.cell_id = 2, .family = Family::neocortical,
         .label = "RS excitatory cell as observed from somatosensory cortex in vitro",
         .c_m = 1.0, .g_leak = 0.0205, .g_na = 56.0, .g_k = 6.0, .g_m = 0.075,
         .e_leak = -70.3, .e_na = 50.0, .e_k = -90.0,
         .v_t = -56.2, .tau_max = 608.0},
        {.cell_id = 3, .family = Family::neocortical,
         .label = "RS inhibitory cell as observed from somatosensory cortex in vitro",
         .c_m = 1.0, .g_leak = 0.0133, .g_na = 10.0, .g_k = 21.0, .g_m = 0.098,
         .e_leak = -56.2, .e_na = 50.0, .e_k = -90.0,
         .v_t = -65.4, .tau_max = 934.0},
        {.cell_id = 4, .family = Family::neocortical,
         .label = "FS cell as observed from ferret Visual Cortex in vitro",
         .c_m = 0.14, .g_leak = 0.15, .g_na = 50.0, .g_k = 10.0,
         .e_leak = -70.0, .e_na = 50.0, .e_k = -90.0,
         .v_t = -61.5},
        {.cell_id = 5, .family = Family::neocortical,
         .label = "FS cell as observed from somatosensory cortex in vitro",
         .c_m = 1.0, .g_leak = 0.038, .g_na = 58.0, .g_k = 3.9, .g_m = 0.0787,
         .e_leak = -70.4, .e_na = 50.0, .e_k = -90.0,
         .v_t = -57.9, .tau_max = 502.0},
        {.cell_id = 6, .family = Family::neocortical,
         .label = "IB cell as observed from guinea pig somatosensory cortex in vitro "
                  "(initial burst followed by adaptive action potentials)",
         .c_m = 0.29, .g_leak = 0.01, .g_na = 50.0, .g_k = 5.0, .g_m = 0.03, .g_ca = 0.1,
         .e_leak = -70.0, .e_na = 50.0, .e_k = -90.0, .e_ca = 120.0,
         .v_t = -56.2, .tau_max = 4000.0},
        {.cell_id = 7, .family = Family::neocortical,
         .label = "IB cell as observed from guinea pig somatosensory cortex in vitro "
                  "(repetitive bursting)",
         .c_m = 0.29, .g_leak = 0.01, .g_na = 50.0, .g_k = 5.0, .g_m = 0.03, .g_ca = 0.2,
         .e_leak = -70.0, .e_na = 50.0, .e_k = -90.0, .e_ca = 120.0,
         .v_t = -56.2, .tau_max = 4000.0},
        {.cell_id = 8, .family = Family::neocortical,
         .label = "IB cell as observed from cat visual cortex",
         .c_m = 0.29, .g_leak = 0.1, .g_na = 50.0, .g_k = 4.2, .g_m = 0.042, .g_ca = 0.12,
         .e_leak = -75.0, .e_na = 50.0, .e_k = -90.0, .e_ca = 120.0,
         .v_t = -58.0, .tau_max = 1000.0},
        {.cell_id = 9, .family = Family::tcr,
         .label = "TCR cell as observed from Mouse thalamocortical relay neuron",
         .c_m = 1.0, .g_leak = 0.05, .g_na = 3.0, .g_k = 5.0, .g_t = 5.0,
         .e_leak = -70.0, .e_na = 50.0, .e_k = -90.0, .e_t = 0.0},
        {.cell_id = 10, .family = Family::rhi,
         .label = "RHI cell as observed from Rat hippocampal interneuron",
         .c_m = 1.0, .g_leak = 0.1, .g_na = 35.0, .g_k = 9.0,
         .e_leak = -65.0, .e_na = 55.0, .e_k = -90.0,
         .phi = 5.0, .v_x = 5.0},
    }};
    return cells;
}

}  // namespace detail

inline const std::array<CellParams, 10>& all_cells() { return detail::cell_table(); }

inline const CellParams& cell_registry(int cell_id) {
    if (cell_id < 1 || cell_id > 10)
        throw std::invalid_argument("unknown cell id " + std::to_string(cell_id) +
                                    " (valid: 1-10)");
    return detail::cell_table()[static_cast<std::size_t>(cell_id - 1)];
}

// Just-above-rheobase stimulus used by each cell's reference protocol, µA/cm².
inline double reference_stimulus(int cell_id) {
    static constexpr std::array<double, 10> stim = {1.4, 0.7, 0.15, 1.75, 0.8,
                                                    0.25, 0.25, 2.25, 0.44, 0.20};
    cell_registry(cell_id);  // bounds check
    return stim[static_cast<std::size_t>(cell_id - 1)];
}

// Per-channel current densities at the given state. Instantaneous gates
// (TCR m,p; RHI m) are evaluated from V here.
inline CurrentBreakdown ionic_currents(const CellState& s, const CellParams& p) {
    CurrentBreakdown c;
    const double v = s.v;
    c.i_leak = p.g_leak * (v - p.e_leak);
    switch (p.family) {
        case Family::neocortical: {
            const double m = s.gates[0], h = s.gates[1], n = s.gates[2];
            c.i_na = p.g_na * m * m * m * h * (v - p.e_na);
            c.i_k = p.g_k * n * n * n * n * (v - p.e_k);
            const GateLayout lay = gate_layout(p);
            if (lay.index_p >= 0)
                c.i_m = p.g_m * s.gates[static_cast<std::size_t>(lay.index_p)] * (v - p.e_k);
            if (lay.index_q >= 0) {
                const double q = s.gates[static_cast<std::size_t>(lay.index_q)];
                const double r = s.gates[static_cast<std::size_t>(lay.index_r)];
                c.i_ca = p.g_ca * q * q * r * (v - p.e_ca);
            }
            break;
        }
        case Family::tcr: {
            const double h = s.gates[0], r = s.gates[1];
            const double m_inf = instantaneous_gate(Family::tcr, Gate::m, v);
            const double p_inf = instantaneous_gate(Family::tcr, Gate::p, v);
            c.i_na = p.g_na * m_inf * m_inf * m_inf * h * (v - p.e_na);
            const double nk = 0.75 * (1.0 - h);
            c.i_k = p.g_k * nk * nk * nk * nk * (v - p.e_k);
            c.i_t = p.g_t * p_inf * p_inf * r * (v - p.e_t);
            break;
        }
        case Family::rhi: {
            const double h = s.gates[0], n = s.gates[1];
            const double m_inf = instantaneous_gate(Family::rhi, Gate::m, v);
            c.i_na = p.g_na * m_inf * m_inf * m_inf * h * (v - p.e_na);
            c.i_k = p.g_k * n * n * n * n * (v - p.e_k);
            break;
        }
    }
    return c;
}

// Full state derivative; k_temp scales every gate's kinetics. The optional
// out parameter receives the currents evaluated on the way.
inline StateDerivative state_derivative(const CellState& s, const CellParams& p,
                                        double i_stim, double k_temp,
                                        CurrentBreakdown* out_currents = nullptr) {
    const CurrentBreakdown c = ionic_currents(s, p);
    if (out_currents) *out_currents = c;

    StateDerivative d;
    d.dv = (-c.total() + i_stim) / p.c_m;
    const double v = s.v;
    switch (p.family) {
        case Family::neocortical: {
            const RatePair am = rate_pair(p.family, Gate::m, v, p.v_t);
            const RatePair ah = rate_pair(p.family, Gate::h, v, p.v_t);
            const RatePair an = rate_pair(p.family, Gate::n, v, p.v_t);
            d.dgates[0] = gate_derivative(s.gates[0], am.alpha, am.beta, k_temp);
            d.dgates[1] = gate_derivative(s.gates[1], ah.alpha, ah.beta, k_temp);
            d.dgates[2] = gate_derivative(s.gates[2], an.alpha, an.beta, k_temp);
            const GateLayout lay = gate_layout(p);
            if (lay.index_p >= 0) {
                const SteadyTau st = steady_tau(p.family, Gate::p, v, p.tau_max);
                const auto i = static_cast<std::size_t>(lay.index_p);
                d.dgates[i] = relaxation_derivative(s.gates[i], st.x_inf, st.tau, k_temp);
            }
            if (lay.index_q >= 0) {
                const RatePair aq = rate_pair(p.family, Gate::q, v);
                const RatePair ar = rate_pair(p.family, Gate::r, v);
                const auto iq = static_cast<std::size_t>(lay.index_q);
                const auto ir = static_cast<std::size_t>(lay.index_r);
                d.dgates[iq] = gate_derivative(s.gates[iq], aq.alpha, aq.beta, k_temp);
                d.dgates[ir] = gate_derivative(s.gates[ir], ar.alpha, ar.beta, k_temp);
            }
            break;
        }
        case Family::tcr: {
            const SteadyTau sh = steady_tau(p.family, Gate::h, v);
            const SteadyTau sr = steady_tau(p.family, Gate::r, v);
            d.dgates[0] = relaxation_derivative(s.gates[0], sh.x_inf, sh.tau, k_temp);
            d.dgates[1] = relaxation_derivative(s.gates[1], sr.x_inf, sr.tau, k_temp);
            break;
        }
        case Family::rhi: {
            // phi speeds up the gated variables only (m is instantaneous)
            const double k = p.phi * k_temp;
            const RatePair ah = rate_pair(p.family, Gate::h, v);
            const RatePair an = rate_pair(p.family, Gate::n, v);
            d.dgates[0] = gate_derivative(s.gates[0], ah.alpha, ah.beta, k);
            d.dgates[1] = gate_derivative(s.gates[1], an.alpha, an.beta, k);
            break;
        }
    }
    return d;
}

// State with every gate at its steady value for voltage v.
inline CellState steady_state_at(const CellParams& p, double v) {
    const GateLayout lay = gate_layout(p);
    CellState s;
    s.v = v;
    s.gate_count = lay.count;
    for (std::size_t i = 0; i < lay.count; ++i) {
        const Gate g = lay.gates[i];
        switch (gate_form(p.family, g)) {
            case GateForm::alpha_beta: {
                const RatePair ab = rate_pair(p.family, g, v, p.v_t);
                s.gates[i] = ab.alpha / (ab.alpha + ab.beta);
                break;
            }
            case GateForm::steady_tau:
                s.gates[i] = steady_tau(p.family, g, v, p.tau_max).x_inf;
                break;
            case GateForm::instantaneous:
                s.gates[i] = instantaneous_gate(p.family, g, v);
                break;
        }
    }
    return s;
}

namespace detail {

// One classic RK4 step; k_temp folded into the derivative. The first-stage
// derivative is taken as an argument so callers that already evaluated it
// (for recording or convergence checks) do not pay for it twice.
inline CellState rk4_step(const CellState& s, const CellParams& p, double i_stim,
                          double k_temp, double dt, const StateDerivative& k1) {
    const std::size_t n = s.gate_count;
    auto advance = [&](const StateDerivative& d, double step) {
        CellState out = s;
        out.v = s.v + step * d.dv;
        for (std::size_t i = 0; i < n; ++i) out.gates[i] = s.gates[i] + step * d.dgates[i];
        return out;
    };
    const StateDerivative k2 = state_derivative(advance(k1, 0.5 * dt), p, i_stim, k_temp);
    const StateDerivative k3 = state_derivative(advance(k2, 0.5 * dt), p, i_stim, k_temp);
    const StateDerivative k4 = state_derivative(advance(k3, dt), p, i_stim, k_temp);

    CellState out = s;
    out.v = s.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    for (std::size_t i = 0; i < n; ++i)
        out.gates[i] = s.gates[i] + dt / 6.0 * (k1.dgates[i] + 2.0 * k2.dgates[i] +
                                                2.0 * k3.dgates[i] + k4.dgates[i]);
    return out;
}

inline CellState rk4_step(const CellState& s, const CellParams& p, double i_stim,
                          double k_temp, double dt) {
    return rk4_step(s, p, i_stim, k_temp, dt, state_derivative(s, p, i_stim, k_temp));
}

inline double derivative_max_norm(const StateDerivative& d, std::size_t n_gates) {
    double m = std::fabs(d.dv);
    for (std::size_t i = 0; i < n_gates; ++i) m = std::max(m, std::fabs(d.dgates[i]));
    return m;
}

// Total steady current with every gate at its steady value for v.
inline double quiescent_current(const CellParams& p, double v) {
    return ionic_currents(steady_state_at(p, v), p).total();
}

// Local Newton refinement of the quiescent fixed point, used when the slow
// gating modes have not fully settled within the relaxation cap. Stays in
// the basin it starts from; rejects steps that walk away from it.
inline bool polish_fixed_point(const CellParams& p, double& v) {
    const double v0 = v;
    for (int it = 0; it < 30; ++it) {
        const double f = quiescent_current(p, v);
        const double h = 1e-4;
        const double df = (quiescent_current(p, v + h) - quiescent_current(p, v - h)) / (2.0 * h);
        if (df == 0.0) return false;
        const double step = f / df;
        v -= step;
        if (std::fabs(v - v0) > 2.0) return false;  // left the local basin
        if (std::fabs(step) < 1e-12) return true;
    }
    return false;
}

}  // namespace detail

struct RestingState {
    CellState state;
    bool converged = false;
    double residual = 0.0;    // max-norm of the state derivative at the end
    double elapsed_ms = 0.0;
};

// Quiescent state: relax from v_start (default E_leak, gates at steady
// state) with zero input until the derivative max-norm drops below tol,
// capped at 3000 ms. A spontaneously active cell is reported unconverged,
// state still returned.
inline RestingState resting_state(const CellParams& p, double tol = 1e-6,
                                  double dt = 0.01,
                                  std::optional<double> v_start = {}) {
    if (!(tol > 0.0)) throw std::invalid_argument("resting_state: tol must be > 0");
    constexpr double kMaxRelaxMs = 3000.0;
    const double k_temp = 1.0;  // rest is defined at the reference temperature

    RestingState r;
    r.state = steady_state_at(p, v_start.value_or(p.e_leak));
    const auto steps = static_cast<long>(kMaxRelaxMs / dt);
    for (long i = 0; i <= steps; ++i) {
        const StateDerivative d = state_derivative(r.state, p, 0.0, k_temp);
        r.residual = detail::derivative_max_norm(d, r.state.gate_count);
        r.elapsed_ms = static_cast<double>(i) * dt;
        if (r.residual < tol) {
            r.converged = true;
            return r;
        }
        if (i < steps) r.state = detail::rk4_step(r.state, p, 0.0, k_temp, dt, d);
    }

    // The slowest gating modes of some cells approach the fixed point but
    // cannot pass tol within the cap; finish with a local root polish and
    // keep it only if it actually lands on the fixed point.
    double v = r.state.v;
    if (detail::polish_fixed_point(p, v)) {
        const CellState polished = steady_state_at(p, v);
        const StateDerivative d = state_derivative(polished, p, 0.0, k_temp);
        const double res = detail::derivative_max_norm(d, polished.gate_count);
        if (res < r.residual) {
            r.state = polished;
            r.residual = res;
            r.converged = res < tol;
        }
    }
    return r;
}

}  // namespace hhe
