#pragma once

// Fixed-step RK4 integration of the membrane equation with per-sample
// current and energy-rate recording, plus spike detection and interspike
// frequency analysis.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhe/cells.hpp"

namespace hhe {

// A constant-current stimulation protocol.
struct Protocol {
    double i_stim = 0.0;          // µA/cm²
    double temperature_c = 36.0;  // degC
    double duration_ms = 4000.0;
    double dt_ms = 0.01;
    double transient_ms = 0.0;    // discarded from analysis, not from the trace

    void validate() const {
        if (!(dt_ms > 0.0)) throw std::invalid_argument("protocol: dt must be > 0");
        if (!(transient_ms >= 0.0))
            throw std::invalid_argument("protocol: transient must be >= 0");
        if (!(duration_ms > transient_ms))
            throw std::invalid_argument("protocol: duration must exceed transient");
        temperature_factor(temperature_c);  // range check
    }
};

// Uniformly sampled record of one integration.
struct Trace {
    std::vector<double> time_ms;
    std::vector<double> v_mv;
    std::vector<std::vector<double>> gates;  // [gate][sample]
    std::vector<std::string> gate_labels;
    std::vector<double> i_leak, i_na, i_k, i_m, i_ca, i_t;  // µA/cm²
    std::vector<double> energy_rate_nw;                     // channel energy rate, nW/cm²

    double dt_ms = 0.0;
    double transient_ms = 0.0;
    double i_stim = 0.0;
    double temperature_c = kReferenceTemperatureC;
    int cell_id = 0;

    std::size_t size() const { return time_ms.size(); }
};

struct IntegrationError : std::runtime_error {
    explicit IntegrationError(double t_ms)
        : std::runtime_error("integration produced a non-finite state at t = " +
                             std::to_string(t_ms) + " ms"),
          time_ms(t_ms) {}
    double time_ms;
};

namespace detail {

// Channel energy rate from an already-evaluated current breakdown:
// sum of I_x (V - E_x) over the present channels, in nW/cm².
inline double energy_rate_from_currents(const CurrentBreakdown& c, const CellParams& p,
                                        double v) {
    return c.i_leak * (v - p.e_leak) + c.i_na * (v - p.e_na) + c.i_k * (v - p.e_k) +
           c.i_m * (v - p.e_k) + c.i_ca * (v - p.e_ca) + c.i_t * (v - p.e_t);
}

inline bool state_is_finite(const CellState& s) {
    if (!std::isfinite(s.v)) return false;
    for (std::size_t i = 0; i < s.gate_count; ++i)
        if (!std::isfinite(s.gates[i])) return false;
    return true;
}

}  // namespace detail

// Integrate from the cell's resting state with the protocol's constant
// stimulus applied for the whole duration. Samples at every dt, t = 0
// included. Throws IntegrationError if the state leaves the finite range.
// Callers running many protocols on one cell can pass the resting state
// in to avoid re-relaxing it every time.
inline Trace integrate(const CellParams& params, const Protocol& protocol,
                       const CellState* initial = nullptr) {
    protocol.validate();
    const double k_temp = temperature_factor(protocol.temperature_c);
    const double dt = protocol.dt_ms;
    const auto n_steps = static_cast<std::size_t>(std::llround(protocol.duration_ms / dt));
    const GateLayout lay = gate_layout(params);

    Trace tr;
    tr.dt_ms = dt;
    tr.transient_ms = protocol.transient_ms;
    tr.i_stim = protocol.i_stim;
    tr.temperature_c = protocol.temperature_c;
    tr.cell_id = params.cell_id;
    tr.gate_labels = gate_names(params);
    const std::size_t n_samples = n_steps + 1;
    tr.time_ms.reserve(n_samples);
    tr.v_mv.reserve(n_samples);
    tr.gates.resize(lay.count);
    for (auto& g : tr.gates) g.reserve(n_samples);
    for (auto* col : {&tr.i_leak, &tr.i_na, &tr.i_k, &tr.i_m, &tr.i_ca, &tr.i_t,
                      &tr.energy_rate_nw})
        col->reserve(n_samples);

    CellState state = initial ? *initial : resting_state(params).state;
    CurrentBreakdown cur;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (!detail::state_is_finite(state)) throw IntegrationError(t);

        // first RK4 stage doubles as the sample record
        const StateDerivative k1 =
            state_derivative(state, params, protocol.i_stim, k_temp, &cur);
        tr.time_ms.push_back(t);
        tr.v_mv.push_back(state.v);
        for (std::size_t g = 0; g < lay.count; ++g) tr.gates[g].push_back(state.gates[g]);
        tr.i_leak.push_back(cur.i_leak);
        tr.i_na.push_back(cur.i_na);
        tr.i_k.push_back(cur.i_k);
        tr.i_m.push_back(cur.i_m);
        tr.i_ca.push_back(cur.i_ca);
        tr.i_t.push_back(cur.i_t);
        tr.energy_rate_nw.push_back(detail::energy_rate_from_currents(cur, params, state.v));

        if (i < n_steps)
            state = detail::rk4_step(state, params, protocol.i_stim, k_temp, dt, k1);
    }
    return tr;
}

// Spike times as upward threshold crossings with hysteresis: after a spike
// no new one is registered until V falls below `reset`. Crossings earlier
// than the trace's transient are not counted.
struct SpikeTrain {
    std::vector<double> times_ms;
    double window_begin_ms = 0.0;
    double window_end_ms = 0.0;

    std::size_t count() const { return times_ms.size(); }
    double window_ms() const { return window_end_ms - window_begin_ms; }
};

inline SpikeTrain detect_spikes(const Trace& tr, double threshold_mv = -20.0,
                                double reset_mv = -30.0) {
    if (!(threshold_mv > reset_mv))
        throw std::invalid_argument("detect_spikes: threshold must exceed reset");
    SpikeTrain spikes;
    spikes.window_begin_ms = tr.transient_ms;
    spikes.window_end_ms = tr.size() ? tr.time_ms.back() : 0.0;
    if (tr.size() < 2) return spikes;

    // armed from the start when below threshold; the reset level only
    // gates re-arming after a registered spike
    bool armed = tr.v_mv[0] < threshold_mv;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        const double v = tr.v_mv[i];
        if (armed && v >= threshold_mv && tr.v_mv[i - 1] < threshold_mv) {
            if (tr.time_ms[i] >= spikes.window_begin_ms)
                spikes.times_ms.push_back(tr.time_ms[i]);
            armed = false;
        } else if (!armed && v < reset_mv) {
            armed = true;
        }
    }
    return spikes;
}

struct FrequencyPoint {
    double time_ms;       // placed at the closing spike of the interval
    double frequency_hz;  // 1000 / interspike interval
};

inline std::vector<FrequencyPoint> interspike_frequencies(const SpikeTrain& spikes) {
    std::vector<FrequencyPoint> out;
    if (spikes.count() < 2) return out;
    out.reserve(spikes.count() - 1);
    for (std::size_t i = 1; i < spikes.count(); ++i) {
        const double isi = spikes.times_ms[i] - spikes.times_ms[i - 1];
        out.push_back({spikes.times_ms[i], 1000.0 / isi});
    }
    return out;
}

// Spike count over the analysis window, in Hz.
inline double mean_frequency(const SpikeTrain& spikes) {
    const double window = spikes.window_ms();
    if (!(window > 0.0))
        throw std::invalid_argument("mean_frequency: empty analysis window");
    return static_cast<double>(spikes.count()) / (window / 1000.0);
}

}  // namespace hhe
